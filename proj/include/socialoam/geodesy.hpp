#pragma once

namespace socialoam {

/// Spherical Earth, mean radius.
inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double lat = 0.0;  ///< degrees, [-90, 90]
  double lon = 0.0;  ///< degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

[[nodiscard]] bool is_valid(const GeoPoint& p) noexcept;

/// Great-circle distance (haversine).
[[nodiscard]] double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Initial great-circle bearing, degrees clockwise from true north in [0, 360).
/// Throws DegenerateGeometry for identical points.
[[nodiscard]] double initial_bearing_deg(const GeoPoint& from, const GeoPoint& to);

/// Point reached after travelling `distance_km` from `from` along the great
/// circle leaving at `bearing_deg`.
[[nodiscard]] GeoPoint destination_point(const GeoPoint& from, double bearing_deg, double distance_km) noexcept;

/// Smallest absolute difference between two directions, in [0, 180].
[[nodiscard]] double angular_difference_deg(double a, double b) noexcept;

/// Wraps an angle into [0, 360).
[[nodiscard]] double wrap_360(double deg) noexcept;

/// Wraps a longitude into [-180, 180).
[[nodiscard]] double wrap_lon(double deg) noexcept;

}  // namespace socialoam
