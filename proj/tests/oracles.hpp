#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's transforms; fields are sampled and integrated directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "h1diff/spectral_field.hpp"

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Naive O(N^2d) DFT coefficient of samples at wavevector (k1, k2),
/// normalised like the library (constant 1 -> 1).
inline std::complex<double> dft_coefficient(const h1diff::Grid& g, std::span<const double> samples,
                                            int k1, int k2 = 0) {
  std::complex<double> sum = 0.0;
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) sum += samples[i] * std::polar(1.0, -k1 * g.node(i));
    return sum / static_cast<double>(n);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sum += samples[i * n + j] * std::polar(1.0, -(k1 * g.node(i) + k2 * g.node(j)));
  return sum / static_cast<double>(n * n);
}

/// Trapezoidal quadrature of sum_c a_c b_c over the torus.
inline double trapezoid_inner(const h1diff::GridField& a, const h1diff::GridField& b) {
  double sum = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  }
  return sum * a.grid().volume() / static_cast<double>(a.grid().size());
}

inline double max_diff(const h1diff::GridField& a, const h1diff::GridField& b) {
  double m = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

/// Max over samples of |f - fn(c, x)|.
template <typename Fn>
double max_error(const h1diff::GridField& f, Fn&& fn) {
  return max_diff(f, h1diff::sample(f.grid(), f.components(), fn));
}

inline double rel_diff(const h1diff::SpectralField& a, const h1diff::SpectralField& b) {
  const double scale = std::max({a.max_abs_coefficient(), b.max_abs_coefficient(), 1e-300});
  return (a - b).max_abs_coefficient() / scale;
}

}  // namespace oracle
