#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>

#include "dpfair/common.hpp"

namespace dpfair::vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void scale(std::span<double> a, double c) {
  for (double& x : a) x *= c;
}

// y += c * x
inline void axpy(double c, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void fill(std::span<double> a, double v) {
  for (double& x : a) x = v;
}

// Cosine of the angle between a and b; 0 if either is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot(a, b) / (na * nb);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace dpfair::vec
