#include "h1diff/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fft.hpp"
#include "h1diff/errors.hpp"

namespace h1diff {

Grid::Grid(int dim, int n, double alias_fraction)
    : dim_(dim), n_(n), alias_fraction_(alias_fraction) {
  if (dim != 1 && dim != 2) throw InvalidInput("grid dimension must be 1 or 2");
  if (n < 8 || n % 2 != 0) throw InvalidInput("grid size must be an even integer >= 8");
  if (!(alias_fraction > 0.0 && alias_fraction <= 1.0))
    throw InvalidInput("alias fraction must lie in (0, 1]");
  // Largest integer strictly below fraction * N / 2.
  cutoff_ = static_cast<int>(std::ceil(alias_fraction * n / 2.0 - 1e-12)) - 1;
  cutoff_ = std::clamp(cutoff_, 0, n / 2 - 1);
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(Grid grid, int components)
    : grid_(grid), data_(components, std::vector<double>(grid.size(), 0.0)) {
  if (components < 1) throw InvalidInput("field needs at least one component");
}

GridField::GridField(Grid grid, std::vector<std::vector<double>> components)
    : grid_(grid), data_(std::move(components)) {
  if (data_.empty()) throw InvalidInput("field needs at least one component");
  for (const auto& c : data_) {
    if (c.size() != grid_.size())
      throw InvalidInput("sample count " + std::to_string(c.size()) + " does not match grid size " +
                         std::to_string(grid_.size()));
  }
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const auto& c : data_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

bool GridField::all_finite() const {
  for (const auto& c : data_)
    for (double v : c)
      if (!std::isfinite(v)) return false;
  return true;
}

GridField& GridField::operator+=(const GridField& other) {
  if (!(grid_ == other.grid_) || components() != other.components())
    throw InvalidInput("grid field shape mismatch");
  for (int c = 0; c < components(); ++c)
    for (std::size_t i = 0; i < grid_.size(); ++i) data_[c][i] += other.data_[c][i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!(grid_ == other.grid_) || components() != other.components())
    throw InvalidInput("grid field shape mismatch");
  for (int c = 0; c < components(); ++c)
    for (std::size_t i = 0; i < grid_.size(); ++i) data_[c][i] -= other.data_[c][i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (auto& c : data_)
    for (double& v : c) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// SpectralField

namespace {

using Coeffs = std::vector<std::vector<Complex>>;

// Calls fn(index, k1, k2) for every Fourier index; k2 = 0 in 1D.
template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) fn(static_cast<std::size_t>(i), g.wavenumber(i), 0);
  } else {
    for (int i = 0; i < n; ++i) {
      const int k1 = g.wavenumber(i);
      for (int j = 0; j < n; ++j)
        fn(static_cast<std::size_t>(i) * n + j, k1, g.wavenumber(j));
    }
  }
}

std::size_t partner_index(const Grid& g, int k1, int k2) {
  const int n = g.n();
  const int i = g.index_of(-k1 == n / 2 ? k1 : -k1);
  if (g.dim() == 1) return static_cast<std::size_t>(i);
  const int j = g.index_of(-k2 == n / 2 ? k2 : -k2);
  return static_cast<std::size_t>(i) * n + j;
}

void dealias_and_symmetrise(const Grid& g, Coeffs& coeffs) {
  for (auto& comp : coeffs) {
    for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
      if (!g.retained(k1) || !g.retained(k2)) {
        comp[idx] = 0.0;
        return;
      }
      const std::size_t p = partner_index(g, k1, k2);
      if (p < idx) return;
      if (p == idx) {
        comp[idx] = comp[idx].real();
        return;
      }
      const Complex avg = 0.5 * (comp[idx] + std::conj(comp[p]));
      comp[idx] = avg;
      comp[p] = std::conj(avg);
    });
  }
}

template <typename Multiplier>
Coeffs map_modes(const SpectralField& f, Multiplier&& mult) {
  const Grid& g = f.grid();
  Coeffs out(f.components(), std::vector<Complex>(g.size()));
  for (int c = 0; c < f.components(); ++c) {
    auto in = f.component(c);
    for_each_mode(g, [&](std::size_t idx, int k1, int k2) { out[c][idx] = mult(k1, k2) * in[idx]; });
  }
  return out;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("fields live on different grids");
  if (a.components() != b.components()) throw InvalidInput("fields have different component counts");
}

void require_vector(const SpectralField& v) {
  if (v.components() != v.grid().dim())
    throw InvalidInput("operation needs a vector field with one component per axis");
}

}  // namespace

SpectralField make_trusted(Grid grid, std::vector<std::vector<Complex>> coeffs) {
  return SpectralField(grid, std::move(coeffs), SpectralField::Trusted{});
}

SpectralField::SpectralField(Grid grid, int components)
    : grid_(grid), coeffs_(components, std::vector<Complex>(grid.size())) {
  if (components < 1) throw InvalidInput("field needs at least one component");
  refresh_flags();
}

SpectralField::SpectralField(Grid grid, std::vector<std::vector<Complex>> coeffs, Trusted)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  refresh_flags();
}

SpectralField SpectralField::from_coefficients(Grid grid, std::vector<std::vector<Complex>> coeffs) {
  if (coeffs.empty()) throw InvalidInput("field needs at least one component");
  for (const auto& c : coeffs)
    if (c.size() != grid.size()) throw InvalidInput("coefficient array does not match grid size");
  dealias_and_symmetrise(grid, coeffs);
  return SpectralField(grid, std::move(coeffs), Trusted{});
}

void SpectralField::refresh_flags() {
  if (components() != grid_.dim()) {
    divergence_free_ = false;
    return;
  }
  const double scale = max_abs_coefficient();
  divergence_free_ = max_divergence() <= 1e-12 * scale;
}

Complex SpectralField::coefficient(int c, std::span<const int> k) const {
  if (static_cast<int>(k.size()) != grid_.dim()) throw InvalidInput("wavevector has wrong length");
  const int half = grid_.n() / 2;
  for (int ki : k)
    if (ki > half || ki < -half) return 0.0;
  std::size_t idx = static_cast<std::size_t>(grid_.index_of(k[0]));
  if (grid_.dim() == 2) idx = idx * grid_.n() + grid_.index_of(k[1]);
  return coeffs_.at(c)[idx];
}

double SpectralField::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& c : coeffs_)
    for (const Complex& z : c) m = std::max(m, std::norm(z));
  return std::sqrt(m);
}

double SpectralField::max_divergence() const {
  if (components() != grid_.dim()) throw InvalidInput("divergence needs a vector field");
  double m = 0.0;
  for_each_mode(grid_, [&](std::size_t idx, int k1, int k2) {
    Complex d = static_cast<double>(k1) * coeffs_[0][idx];
    if (grid_.dim() == 2) d += static_cast<double>(k2) * coeffs_[1][idx];
    m = std::max(m, std::norm(d));
  });
  return std::sqrt(m);
}

bool SpectralField::all_finite() const {
  for (const auto& c : coeffs_)
    for (const Complex& z : c)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (int c = 0; c < components(); ++c)
    for (std::size_t i = 0; i < grid_.size(); ++i) coeffs_[c][i] += other.coeffs_[c][i];
  refresh_flags();
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (int c = 0; c < components(); ++c)
    for (std::size_t i = 0; i < grid_.size(); ++i) coeffs_[c][i] -= other.coeffs_[c][i];
  refresh_flags();
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_)
    for (Complex& z : c) z *= s;
  refresh_flags();
  return *this;
}

// ---------------------------------------------------------------------------
// Transforms

SpectralField to_spectral(const GridField& samples) {
  if (!samples.all_finite()) throw InvalidInput("non-finite samples passed to to_spectral");
  const Grid& g = samples.grid();
  const double norm = 1.0 / static_cast<double>(g.size());
  Coeffs coeffs(samples.components());
  for (int c = 0; c < samples.components(); ++c) {
    auto in = samples.component(c);
    coeffs[c].assign(in.begin(), in.end());
    detail::fft_forward(g, coeffs[c]);
    for (Complex& z : coeffs[c]) z *= norm;
  }
  dealias_and_symmetrise(g, coeffs);
  return make_trusted(g, std::move(coeffs));
}

GridField to_physical(const SpectralField& f) {
  const Grid& g = f.grid();
  const double scale = std::max(f.max_abs_coefficient(), 1e-300);
  std::vector<std::vector<double>> out(f.components());
  std::vector<Complex> work;
  for (int c = 0; c < f.components(); ++c) {
    auto in = f.component(c);
    work.assign(in.begin(), in.end());
    detail::fft_inverse(g, work);
    out[c].resize(g.size());
    double residue = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      out[c][i] = work[i].real();
      residue = std::max(residue, std::abs(work[i].imag()));
    }
    if (residue > 1e-12 * scale)
      throw ConsistencyError("imaginary residue " + std::to_string(residue) +
                             " after inverse transform");
  }
  return GridField(g, std::move(out));
}

// ---------------------------------------------------------------------------
// Linear operators

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim()) throw InvalidInput("derivative axis out of range");
  return make_trusted(f.grid(), map_modes(f, [axis](int k1, int k2) {
                        return Complex(0.0, static_cast<double>(axis == 0 ? k1 : k2));
                      }));
}

SpectralField laplacian(const SpectralField& f) {
  return make_trusted(f.grid(), map_modes(f, [](int k1, int k2) {
                        return Complex(-static_cast<double>(k1 * k1 + k2 * k2), 0.0);
                      }));
}

SpectralField inverse_laplacian(const SpectralField& f) {
  return make_trusted(f.grid(), map_modes(f, [](int k1, int k2) {
                        const int k2sum = k1 * k1 + k2 * k2;
                        return k2sum == 0 ? Complex(0.0) : Complex(-1.0 / k2sum, 0.0);
                      }));
}

SpectralField helmholtz_apply(const SpectralField& f, double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("alpha must be finite");
  const double a2 = alpha * alpha;
  return make_trusted(f.grid(), map_modes(f, [a2](int k1, int k2) {
                        return Complex(1.0 + a2 * (k1 * k1 + k2 * k2), 0.0);
                      }));
}

SpectralField helmholtz_inverse(const SpectralField& f, double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("alpha must be finite");
  const double a2 = alpha * alpha;
  return make_trusted(f.grid(), map_modes(f, [a2](int k1, int k2) {
                        return Complex(1.0 / (1.0 + a2 * (k1 * k1 + k2 * k2)), 0.0);
                      }));
}

SpectralField divergence(const SpectralField& v) {
  require_vector(v);
  const Grid& g = v.grid();
  Coeffs out(1, std::vector<Complex>(g.size()));
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    Complex d = Complex(0.0, k1) * v.component(0)[idx];
    if (g.dim() == 2) d += Complex(0.0, k2) * v.component(1)[idx];
    out[0][idx] = d;
  });
  return make_trusted(g, std::move(out));
}

SpectralField gradient(const SpectralField& scalar) {
  if (scalar.components() != 1) throw InvalidInput("gradient needs a scalar field");
  const Grid& g = scalar.grid();
  Coeffs out(g.dim(), std::vector<Complex>(g.size()));
  auto in = scalar.component(0);
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    out[0][idx] = Complex(0.0, k1) * in[idx];
    if (g.dim() == 2) out[1][idx] = Complex(0.0, k2) * in[idx];
  });
  return make_trusted(g, std::move(out));
}

SpectralField gradient_part(const SpectralField& v) {
  require_vector(v);
  const Grid& g = v.grid();
  const int dim = g.dim();
  Coeffs out(dim, std::vector<Complex>(g.size()));
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const int ksq = k1 * k1 + k2 * k2;
    if (ksq == 0) return;
    const double k[2] = {static_cast<double>(k1), static_cast<double>(k2)};
    Complex kdotv = k[0] * v.component(0)[idx];
    if (dim == 2) kdotv += k[1] * v.component(1)[idx];
    for (int c = 0; c < dim; ++c) out[c][idx] = k[c] * kdotv / static_cast<double>(ksq);
  });
  return make_trusted(g, std::move(out));
}

SpectralField leray_project(const SpectralField& v) {
  require_vector(v);
  const Grid& g = v.grid();
  const int dim = g.dim();
  Coeffs out(dim, std::vector<Complex>(g.size()));
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const int ksq = k1 * k1 + k2 * k2;
    if (ksq == 0) {
      for (int c = 0; c < dim; ++c) out[c][idx] = v.component(c)[idx];
      return;
    }
    const double k[2] = {static_cast<double>(k1), static_cast<double>(k2)};
    Complex kdotv = k[0] * v.component(0)[idx];
    if (dim == 2) kdotv += k[1] * v.component(1)[idx];
    for (int c = 0; c < dim; ++c)
      out[c][idx] = v.component(c)[idx] - k[c] * kdotv / static_cast<double>(ksq);
  });
  return make_trusted(g, std::move(out));
}

// ---------------------------------------------------------------------------
// Inner products

namespace {

double weighted_inner(const SpectralField& x, const SpectralField& y, double a2) {
  require_same_grid(x, y);
  const Grid& g = x.grid();
  double sum = 0.0;
  for (int c = 0; c < x.components(); ++c) {
    auto xc = x.component(c);
    auto yc = y.component(c);
    for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
      const double w = 1.0 + a2 * (k1 * k1 + k2 * k2);
      sum += w * (xc[idx].real() * yc[idx].real() + xc[idx].imag() * yc[idx].imag());
    });
  }
  return g.volume() * sum;
}

}  // namespace

double l2_inner(const SpectralField& x, const SpectralField& y) { return weighted_inner(x, y, 0.0); }

double h1_inner(const SpectralField& x, const SpectralField& y, double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("alpha must be finite");
  return weighted_inner(x, y, alpha * alpha);
}

double h1_norm(const SpectralField& x, double alpha) {
  return std::sqrt(std::max(0.0, h1_inner(x, x, alpha)));
}

double l2_norm(const SpectralField& x) { return std::sqrt(std::max(0.0, l2_inner(x, x))); }

// ---------------------------------------------------------------------------
// Nonlinear helpers

GridField multiply(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("product of fields on different grids");
  const int ca = a.components();
  const int cb = b.components();
  if (ca != cb && ca != 1 && cb != 1) throw InvalidInput("product component counts incompatible");
  const int comps = std::max(ca, cb);
  GridField out(a.grid(), comps);
  for (int c = 0; c < comps; ++c) {
    auto av = a.component(ca == 1 ? 0 : c);
    auto bv = b.component(cb == 1 ? 0 : c);
    auto ov = out.component(c);
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
  }
  return out;
}

SpectralField pointwise_product(const GridField& a, const GridField& b) {
  return to_spectral(multiply(a, b));
}

SpectralField component(const SpectralField& f, int c) {
  auto in = f.component(c);
  Coeffs out(1, std::vector<Complex>(in.begin(), in.end()));
  return make_trusted(f.grid(), std::move(out));
}

SpectralField stack(std::span<const SpectralField> scalars) {
  if (scalars.empty()) throw InvalidInput("stack needs at least one field");
  Coeffs out;
  for (const auto& s : scalars) {
    if (!(s.grid() == scalars.front().grid())) throw InvalidInput("stack across different grids");
    for (int c = 0; c < s.components(); ++c) {
      auto in = s.component(c);
      out.emplace_back(in.begin(), in.end());
    }
  }
  return make_trusted(scalars.front().grid(), std::move(out));
}

double evaluate_with_gradient(const SpectralField& f, int c, std::span<const double> x,
                              std::span<double> grad) {
  const Grid& g = f.grid();
  if (static_cast<int>(x.size()) != g.dim()) throw InvalidInput("evaluation point has wrong dimension");
  const int kc = g.cutoff();
  const int n = g.n();
  auto coeffs = f.component(c);

  // e^{i k x} for k = -kc..kc along each axis.
  auto phases = [kc](double xi) {
    std::vector<Complex> e(2 * kc + 1);
    for (int k = -kc; k <= kc; ++k) e[k + kc] = std::polar(1.0, k * xi);
    return e;
  };

  if (g.dim() == 1) {
    const auto e = phases(x[0]);
    Complex val = 0.0, d1 = 0.0;
    for (int k = -kc; k <= kc; ++k) {
      const Complex term = coeffs[g.index_of(k)] * e[k + kc];
      val += term;
      d1 += Complex(0.0, k) * term;
    }
    if (!grad.empty()) grad[0] = d1.real();
    return val.real();
  }

  const auto e1 = phases(x[0]);
  const auto e2 = phases(x[1]);
  Complex val = 0.0, d1 = 0.0, d2 = 0.0;
  for (int k1 = -kc; k1 <= kc; ++k1) {
    const std::size_t row = static_cast<std::size_t>(g.index_of(k1)) * n;
    Complex inner = 0.0, inner_d2 = 0.0;
    for (int k2 = -kc; k2 <= kc; ++k2) {
      const Complex term = coeffs[row + g.index_of(k2)] * e2[k2 + kc];
      inner += term;
      inner_d2 += Complex(0.0, k2) * term;
    }
    val += e1[k1 + kc] * inner;
    d1 += Complex(0.0, k1) * e1[k1 + kc] * inner;
    d2 += e1[k1 + kc] * inner_d2;
  }
  if (!grad.empty()) {
    grad[0] = d1.real();
    grad[1] = d2.real();
  }
  return val.real();
}

double evaluate(const SpectralField& f, int c, std::span<const double> x) {
  return evaluate_with_gradient(f, c, x, {});
}

double relative_divergence(const SpectralField& v) {
  const double scale = v.max_abs_coefficient();
  if (scale == 0.0) return 0.0;
  return v.max_divergence() / scale;
}

// ---------------------------------------------------------------------------
// Random fields

namespace {

// Bit-exact uniform and normal variates from the (fully specified) mt19937_64
// stream, so seeded fields reproduce across standard libraries.
class Variates {
 public:
  explicit Variates(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

Coeffs random_coeffs(const Grid& g, int components, Variates& rng, int max_mode) {
  if (max_mode < 1 || max_mode > g.cutoff())
    throw InvalidInput("random field max_mode must lie in [1, cutoff]");
  Coeffs coeffs(components, std::vector<Complex>(g.size()));
  for (int c = 0; c < components; ++c) {
    for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
      if (std::abs(k1) > max_mode || std::abs(k2) > max_mode) return;
      if (k1 == 0 && k2 == 0) return;
      const double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      const double re = rng.normal();
      const double im = rng.normal();
      coeffs[c][idx] = decay * Complex(re, im);
    });
  }
  dealias_and_symmetrise(g, coeffs);
  return coeffs;
}

}  // namespace

SpectralField random_band_limited(const Grid& grid, int components, std::uint64_t seed, int max_mode,
                                  double amplitude) {
  Variates rng(seed);
  auto coeffs = random_coeffs(grid, components, rng, max_mode);
  auto f = make_trusted(grid, std::move(coeffs));
  const double rms = l2_norm(f) / std::sqrt(grid.volume() * components);
  return rms > 0.0 ? (amplitude / rms) * f : f;
}

SpectralField random_divergence_free(const Grid& grid, std::uint64_t seed, int max_mode,
                                     double amplitude) {
  if (grid.dim() != 2) throw InvalidInput("random_divergence_free needs a 2D grid");
  Variates rng(seed);
  auto psi = make_trusted(grid, random_coeffs(grid, 1, rng, max_mode));
  // u = (d psi/dx2, -d psi/dx1)
  const SpectralField parts[2] = {derivative(psi, 1), -derivative(psi, 0)};
  auto u = stack(parts);
  const double rms = l2_norm(u) / std::sqrt(grid.volume());
  return rms > 0.0 ? (amplitude / rms) * u : u;
}

}  // namespace h1diff
