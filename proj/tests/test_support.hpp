#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hofem/operators.hpp"

namespace hofem::testing {

inline FieldVector random_field(std::size_t n_el, std::size_t n_p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldVector f(n_el, n_p);
  for (auto& v : f.data()) v = u(rng);
  return f;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// ||a - b||_inf / ||b||_inf
inline double rel_inf_error(std::span<const double> a, std::span<const double> b) {
  const double scale = max_abs(b);
  return max_abs_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}

inline double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace hofem::testing
