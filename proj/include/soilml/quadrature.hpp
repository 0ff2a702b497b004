#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "soilml/errors.hpp"

namespace soilml::quad {

/// Integral of uniformly sampled values with spacing h over the sampled span.
/// Composite Newton-Cotes built from Simpson 3/8 triplets with Simpson 1/3
/// pairs closing the remainder, so every sample count above two intervals is
/// covered by rules exact through cubics:
///   n % 3 == 0 : 3/8 triplets only
///   n % 3 == 2 : triplets plus one 1/3 pair
///   n % 3 == 1 : triplets plus two 1/3 pairs (needs n >= 4)
/// A single interval falls back to the trapezoid rule.
template <typename Derived>
double integrate_uniform(const Eigen::DenseBase<Derived>& y, double h) {
  const Eigen::Index m = y.size();
  if (m < 2)
    throw InsufficientDataError("integrate_uniform: need at least 2 samples");
  if (!(h > 0.0) || !std::isfinite(h))
    throw ValidationError("integrate_uniform: step must be finite and > 0");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!std::isfinite(static_cast<double>(y(i))))
      throw ValidationError("integrate_uniform: non-finite sample");

  const Eigen::Index n = m - 1;
  if (n == 1) return 0.5 * h * (static_cast<double>(y(0)) + static_cast<double>(y(1)));

  Eigen::Index pairs = 0;
  switch (n % 3) {
    case 0: pairs = 0; break;
    case 2: pairs = 1; break;
    default: pairs = 2; break;  // n >= 4 here because n == 1 was handled above
  }
  const Eigen::Index triplets = (n - 2 * pairs) / 3;

  double acc = 0.0;
  Eigen::Index i = 0;
  for (Eigen::Index t = 0; t < triplets; ++t, i += 3)
    acc += 0.375 * h *
           (static_cast<double>(y(i)) + 3.0 * static_cast<double>(y(i + 1)) +
            3.0 * static_cast<double>(y(i + 2)) + static_cast<double>(y(i + 3)));
  for (Eigen::Index p = 0; p < pairs; ++p, i += 2)
    acc += (h / 3.0) *
           (static_cast<double>(y(i)) + 4.0 * static_cast<double>(y(i + 1)) +
            static_cast<double>(y(i + 2)));
  return acc;
}

double integrate_uniform(const std::vector<double>& y, double h);

/// Mean value of the sampled function: integral divided by the span n*h.
template <typename Derived>
double average(const Eigen::DenseBase<Derived>& y, double h) {
  return integrate_uniform(y, h) / (static_cast<double>(y.size() - 1) * h);
}

double average(const std::vector<double>& y, double h);

}  // namespace soilml::quad
