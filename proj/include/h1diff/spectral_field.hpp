#pragma once

// Periodic-grid and Fourier-space kernels on T^1 and T^2.
//
// Conventions used throughout the library:
//   * Fourier coefficients are normalised so that f(x) = sum_k c_k exp(i<k,x>);
//     the constant field 1 has c_0 = 1.
//   * Laplacian is the analysts' componentwise operator, symbol -|k|^2.
//   * Helmholtz operator H_a = 1 - a^2 Laplacian, symbol 1 + a^2 |k|^2.
//   * Inverse Laplacian sends the k = 0 mode to zero (zero-mean gauge).
//   * Leray projector P = I - grad Laplacian^{-1} div, gradient part Q = I - P.
//     All of these are Fourier multipliers on the torus and commute.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "h1diff/grid.hpp"

namespace h1diff {

using Complex = std::complex<double>;

/// Real samples of a scalar or vector field on a periodic grid.
class GridField {
 public:
  GridField(Grid grid, int components);
  GridField(Grid grid, std::vector<std::vector<double>> components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return static_cast<int>(data_.size()); }

  std::span<const double> component(int c) const { return data_.at(c); }
  std::span<double> component(int c) { return data_.at(c); }

  double max_abs() const;
  bool all_finite() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double s, GridField a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<std::vector<double>> data_;
};

/// Samples fn(component, x) at every grid node. x has grid.dim() entries.
template <typename Fn>
GridField sample(const Grid& grid, int components, Fn&& fn);

/// Fourier representation of a real field; Hermitian-symmetric and dealiased.
class SpectralField {
 public:
  /// Zero field.
  SpectralField(Grid grid, int components);

  /// Builds a field from raw coefficient arrays in FFT order. Modes beyond the
  /// alias cutoff are zeroed and the arrays are symmetrised so the field is real.
  static SpectralField from_coefficients(Grid grid, std::vector<std::vector<Complex>> coeffs);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return static_cast<int>(coeffs_.size()); }
  std::span<const Complex> component(int c) const { return coeffs_.at(c); }

  /// Coefficient of component c at integer wavevector k (one entry per axis).
  /// Wavevectors outside |k_i| <= N/2 read as zero.
  Complex coefficient(int c, std::span<const int> k) const;

  /// Cached: components == dim and the divergence symbol vanishes to
  /// 1e-12 * max |coefficient| at every k.
  bool is_divergence_free() const noexcept { return divergence_free_; }

  double max_abs_coefficient() const;
  /// max_k |sum_i k_i u_i(k)|.
  double max_divergence() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

 private:
  struct Trusted {};
  SpectralField(Grid grid, std::vector<std::vector<Complex>> coeffs, Trusted);
  void refresh_flags();

  Grid grid_;
  std::vector<std::vector<Complex>> coeffs_;
  bool divergence_free_ = false;

  friend SpectralField make_trusted(Grid grid, std::vector<std::vector<Complex>> coeffs);
};

// ---------------------------------------------------------------------------
// Transforms

/// Forward transform plus dealiasing. Throws InvalidInput on non-finite samples.
SpectralField to_spectral(const GridField& samples);

/// Inverse transform. Throws ConsistencyError if the imaginary residue exceeds
/// 1e-12 (relative to the largest coefficient).
GridField to_physical(const SpectralField& f);

// ---------------------------------------------------------------------------
// Linear operators (all Fourier multipliers)

SpectralField derivative(const SpectralField& f, int axis);
SpectralField laplacian(const SpectralField& f);
SpectralField inverse_laplacian(const SpectralField& f);
SpectralField helmholtz_apply(const SpectralField& f, double alpha);
SpectralField helmholtz_inverse(const SpectralField& f, double alpha);

/// Scalar divergence of a vector field.
SpectralField divergence(const SpectralField& v);
/// Vector gradient of a scalar field.
SpectralField gradient(const SpectralField& scalar);

/// Divergence-free part P(V).
SpectralField leray_project(const SpectralField& v);
/// Gradient part Q(V) = grad Laplacian^{-1} div V.
SpectralField gradient_part(const SpectralField& v);

// ---------------------------------------------------------------------------
// Inner products (exact via Parseval)

double l2_inner(const SpectralField& x, const SpectralField& y);
/// <X,Y>_{L2} + alpha^2 <grad X, grad Y>_{L2}.
double h1_inner(const SpectralField& x, const SpectralField& y, double alpha);
double h1_norm(const SpectralField& x, double alpha);
double l2_norm(const SpectralField& x);

// ---------------------------------------------------------------------------
// Nonlinear helpers

/// Physical-space product followed by a dealiased forward transform. A
/// single-component factor broadcasts over the other's components.
SpectralField pointwise_product(const GridField& a, const GridField& b);
GridField multiply(const GridField& a, const GridField& b);

SpectralField component(const SpectralField& f, int c);
SpectralField stack(std::span<const SpectralField> scalars);

/// Evaluates component c of f at an arbitrary point (trigonometric interpolation).
double evaluate(const SpectralField& f, int c, std::span<const double> x);
/// Value and gradient of component c at x; grad has dim entries.
double evaluate_with_gradient(const SpectralField& f, int c, std::span<const double> x,
                              std::span<double> grad);

/// Max over retained wavevectors of |sum_i k_i u_i(k)| relative to max |u(k)|.
double relative_divergence(const SpectralField& v);

// ---------------------------------------------------------------------------
// Deterministic random fields

/// Random band-limited field with modes |k_i| <= max_mode, coefficient size
/// decaying like 1/(1+|k|^2), scaled to unit RMS per component times amplitude.
SpectralField random_band_limited(const Grid& grid, int components, std::uint64_t seed,
                                  int max_mode, double amplitude = 1.0);

/// Random divergence-free field on T^2 built from a random stream function,
/// scaled to RMS speed `amplitude`.
SpectralField random_divergence_free(const Grid& grid, std::uint64_t seed, int max_mode,
                                     double amplitude = 1.0);

// ---------------------------------------------------------------------------

template <typename Fn>
GridField sample(const Grid& grid, int components, Fn&& fn) {
  GridField out(grid, components);
  const int n = grid.n();
  double x[2] = {0.0, 0.0};
  for (int c = 0; c < components; ++c) {
    auto data = out.component(c);
    if (grid.dim() == 1) {
      for (int i = 0; i < n; ++i) {
        x[0] = grid.node(i);
        data[i] = fn(c, std::span<const double>(x, 1));
      }
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          x[0] = grid.node(i);
          x[1] = grid.node(j);
          data[static_cast<std::size_t>(i) * n + j] = fn(c, std::span<const double>(x, 2));
        }
      }
    }
  }
  return out;
}

}  // namespace h1diff
