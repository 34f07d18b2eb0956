#pragma once

#include <cmath>

#include <Eigen/Core>

namespace socialoam {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Standard deviation of the indicator for a window of `length` samples:
/// `multiplier * length / 6`, so that +-3 sigma spans the window by default.
template <typename Scalar = double>
[[nodiscard]] constexpr Scalar indicator_sigma(Eigen::Index length, Scalar multiplier = Scalar(1)) {
  return multiplier * static_cast<Scalar>(length) / Scalar(6);
}

/// Gaussian bump centred on the window midpoint, peak value 1:
///   s[k] = exp(-(k - (L-1)/2)^2 / (2 sigma^2)),  k = 0..L-1.
/// A single-sample window yields [1].
template <typename Scalar = double>
[[nodiscard]] Vector<Scalar> gaussian_window(Eigen::Index length, Scalar sigma_multiplier = Scalar(1)) {
  Vector<Scalar> s(length);
  const Scalar mid = static_cast<Scalar>(length - 1) / Scalar(2);
  const Scalar sigma = indicator_sigma<Scalar>(length, sigma_multiplier);
  const Scalar two_var = Scalar(2) * sigma * sigma;
  for (Eigen::Index k = 0; k < length; ++k) {
    const Scalar d = static_cast<Scalar>(k) - mid;
    s[k] = std::exp(-(d * d) / two_var);
  }
  return s;
}

/// Same profile evaluated at absolute sample positions, centred on `mu`.
/// Used by the scenario generator to inject event-shaped anomalies.
template <typename Scalar = double>
[[nodiscard]] Scalar gaussian_at(Scalar n, Scalar mu, Scalar sigma) {
  const Scalar d = n - mu;
  return std::exp(-(d * d) / (Scalar(2) * sigma * sigma));
}

}  // namespace socialoam
