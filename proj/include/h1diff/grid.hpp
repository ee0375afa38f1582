#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace h1diff {

/// Uniform periodic grid on the torus [0, 2π)^dim.
///
/// Nodes sit at x_j = 2πj/N (endpoint excluded). Wavenumbers use FFT ordering:
/// index i maps to k = i for i <= N/2 and k = i - N otherwise.
class Grid {
 public:
  Grid(int dim, int n, double alias_fraction = 2.0 / 3.0);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double alias_fraction() const noexcept { return alias_fraction_; }

  /// Largest |k_i| retained by the dealiasing filter (strictly below fraction*N/2).
  int cutoff() const noexcept { return cutoff_; }

  /// Number of nodes (= number of Fourier coefficients) per component.
  std::size_t size() const noexcept { return size_; }

  double spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }
  double node(int j) const noexcept { return spacing() * j; }

  /// Signed wavenumber for FFT index i.
  int wavenumber(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  /// FFT index for signed wavenumber k (|k| <= N/2).
  int index_of(int k) const noexcept { return k >= 0 ? k : k + n_; }

  bool retained(int k) const noexcept { return k <= cutoff_ && k >= -cutoff_; }

  /// Volume of the torus, (2π)^dim.
  double volume() const noexcept { return std::pow(2.0 * std::numbers::pi, dim_); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.cutoff_ == b.cutoff_;
  }

 private:
  int dim_;
  int n_;
  double alias_fraction_;
  int cutoff_;
  std::size_t size_;
};

}  // namespace h1diff
