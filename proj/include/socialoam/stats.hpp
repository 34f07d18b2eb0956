#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "socialoam/errors.hpp"

namespace socialoam {

/// Absent-sample marker used in every KPI vector.
template <typename Scalar = double>
inline constexpr Scalar kAbsent = std::numeric_limits<Scalar>::quiet_NaN();

template <typename Scalar>
[[nodiscard]] inline bool is_absent(Scalar v) noexcept {
  return std::isnan(v);
}

/// Sample Pearson correlation over the pairs where both samples are present.
///
/// Returns nullopt when fewer than 3 pairs remain or either side is constant
/// over those pairs. Throws LengthMismatch for different lengths.
template <typename DerivedX, typename DerivedY>
[[nodiscard]] std::optional<typename DerivedX::Scalar> pearson(const Eigen::DenseBase<DerivedX>& x,
                                                               const Eigen::DenseBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw LengthMismatch("pearson: vectors differ in length");

  Eigen::Index n = 0;
  Scalar sum_x = 0;
  Scalar sum_y = 0;
  Scalar min_x = std::numeric_limits<Scalar>::infinity();
  Scalar max_x = -min_x;
  Scalar min_y = min_x;
  Scalar max_y = -min_x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Scalar xi = x.derived().coeff(i);
    const Scalar yi = static_cast<Scalar>(y.derived().coeff(i));
    if (is_absent(xi) || is_absent(yi)) continue;
    ++n;
    sum_x += xi;
    sum_y += yi;
    min_x = std::min(min_x, xi);
    max_x = std::max(max_x, xi);
    min_y = std::min(min_y, yi);
    max_y = std::max(max_y, yi);
  }
  if (n < 3 || min_x == max_x || min_y == max_y) return std::nullopt;

  const Scalar mean_x = sum_x / static_cast<Scalar>(n);
  const Scalar mean_y = sum_y / static_cast<Scalar>(n);
  Scalar sxy = 0;
  Scalar sxx = 0;
  Scalar syy = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Scalar xi = x.derived().coeff(i);
    const Scalar yi = static_cast<Scalar>(y.derived().coeff(i));
    if (is_absent(xi) || is_absent(yi)) continue;
    const Scalar dx = xi - mean_x;
    const Scalar dy = yi - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), Scalar(-1), Scalar(1));
}

/// Number of index positions where both inputs are present.
template <typename DerivedX, typename DerivedY>
[[nodiscard]] Eigen::Index count_present_pairs(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!is_absent(x.derived().coeff(i)) && !is_absent(y.derived().coeff(i))) ++n;
  }
  return n;
}

/// Median of a list; averages the two middle values for even counts.
/// Returns NaN for an empty list.
template <typename Scalar>
[[nodiscard]] Scalar median(std::vector<Scalar> values) {
  if (values.empty()) return kAbsent<Scalar>;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const Scalar upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const Scalar lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / Scalar(2);
}

}  // namespace socialoam
