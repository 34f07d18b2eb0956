#include "socialoam/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "socialoam/errors.hpp"

namespace socialoam {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 &&
         p.lon <= 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double sin_dphi = std::sin(0.5 * (phi2 - phi1));
  const double sin_dlambda = std::sin(0.5 * (b.lon - a.lon) * kDegToRad);
  const double h = sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to) {
  if (from == to) throw DegenerateGeometry("bearing undefined between identical points");
  const double phi1 = from.lat * kDegToRad;
  const double phi2 = to.lat * kDegToRad;
  const double dlambda = (to.lon - from.lon) * kDegToRad;
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return wrap_360(std::atan2(y, x) * kRadToDeg);
}

GeoPoint destination_point(const GeoPoint& from, double bearing_deg, double distance_km) noexcept {
  const double delta = distance_km / kEarthRadiusKm;
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = from.lat * kDegToRad;
  const double lambda1 = from.lon * kDegToRad;
  const double sin_phi2 = std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 = lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                              std::cos(delta) - std::sin(phi1) * sin_phi2);
  return {phi2 * kRadToDeg, wrap_lon(lambda2 * kRadToDeg)};
}

double angular_difference_deg(double a, double b) noexcept {
  const double d = wrap_360(a - b);
  return d > 180.0 ? 360.0 - d : d;
}

double wrap_360(double deg) noexcept {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  // fmod of a tiny negative value can round back up to 360.
  return w >= 360.0 ? 0.0 : w;
}

double wrap_lon(double deg) noexcept {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

}  // namespace socialoam
