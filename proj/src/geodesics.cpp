#include "h1diff/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "h1diff/errors.hpp"
#include "h1diff/euler_alpha.hpp"

namespace h1diff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fast evaluation of a 1D band-limited field and its derivative at arbitrary x.
class Interp1D {
 public:
  explicit Interp1D(const SpectralField& f) {
    const int kc = f.grid().cutoff();
    auto c = f.component(0);
    coeffs_.assign(c.begin(), c.begin() + kc + 1);
  }

  double value(double x) const {
    double v, dv;
    eval(x, v, dv);
    return v;
  }

  void eval(double x, double& v, double& dv) const {
    const Complex step = std::polar(1.0, x);
    Complex e = step;
    v = coeffs_[0].real();
    dv = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      const Complex t = coeffs_[k] * e;
      v += 2.0 * t.real();
      dv -= 2.0 * static_cast<double>(k) * t.imag();
      e *= step;
    }
  }

 private:
  std::vector<Complex> coeffs_;
};

GridField scalar_derivative(const GridField& f) { return to_physical(derivative(to_spectral(f), 0)); }

GridField filtered(const GridField& f) { return to_physical(to_spectral(f)); }

void require_1d(const DiffeoState& s) {
  if (s.grid().dim() != 1) throw InvalidInput("operation needs a 1D configuration");
}

void require_consistent(const DiffeoState& s) {
  const int dim = s.grid().dim();
  if (s.displacement.components() != dim || s.velocity.components() != dim)
    throw InvalidInput("configuration fields need one component per axis");
  if (!(s.velocity.grid() == s.grid())) throw InvalidInput("displacement and velocity grids differ");
  if (!s.displacement.all_finite() || !s.velocity.all_finite())
    throw InvalidInput("configuration contains non-finite values");
}

GridField jacobian_1d(const DiffeoState& s) {
  GridField ex = scalar_derivative(s.displacement);
  for (double& v : ex.component(0)) v += 1.0;
  return ex;
}

double min_of(const GridField& f) {
  auto c = f.component(0);
  double m = c[0];
  for (double v : c) {
    if (std::isnan(v)) return v;
    m = std::min(m, v);
  }
  return m;
}

void require_orientation(const GridField& eta_x) {
  const double m = min_of(eta_x);
  if (!(m > 0.0))
    throw BreakdownError("map is not an orientation-preserving diffeomorphism (min eta_x = " +
                             std::to_string(m) + ")",
                         m);
}

// Solves x + d(x) = y with d' > -1.
double invert_point(const Interp1D& d, double y, double dmax) {
  double lo = y - dmax - 0.1;
  double hi = y + dmax + 0.1;
  double v, dv;
  d.eval(y, v, dv);
  double x = y - v;
  for (int it = 0; it < 100; ++it) {
    d.eval(x, v, dv);
    const double g = x + v - y;
    if (g > 0.0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    if (std::abs(g) < 1e-15 * (1.0 + std::abs(y))) return x;
    double next = x - g / (1.0 + dv);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-16 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace

DiffeoState identity_state(const Grid& grid, const GridField& velocity, double alpha) {
  if (!(velocity.grid() == grid) || velocity.components() != grid.dim())
    throw InvalidInput("initial velocity needs one component per axis on the given grid");
  return DiffeoState{GridField(grid, grid.dim()), velocity, alpha, 0.0};
}

double min_jacobian(const DiffeoState& state) {
  require_1d(state);
  return min_of(jacobian_1d(state));
}

GridField spray_1d_alpha0(const DiffeoState& state) {
  require_1d(state);
  require_consistent(state);
  const GridField eta_x = jacobian_1d(state);
  require_orientation(eta_x);
  const GridField v_x = scalar_derivative(state.velocity);
  GridField out(state.grid(), 1);
  auto o = out.component(0);
  auto v = state.velocity.component(0);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = -2.0 * v_x.component(0)[i] * v[i] / eta_x.component(0)[i];
  return out;
}

std::vector<std::array<double, 2>> invert_map(const DiffeoState& state) {
  require_consistent(state);
  const Grid& g = state.grid();
  const int n = g.n();
  std::vector<std::array<double, 2>> xs(g.size());

  if (g.dim() == 1) {
    require_orientation(jacobian_1d(state));
    const Interp1D d(to_spectral(state.displacement));
    const double dmax = state.displacement.max_abs();
    for (int j = 0; j < n; ++j) xs[j] = {invert_point(d, g.node(j), dmax), 0.0};
    return xs;
  }

  const SpectralField d = to_spectral(state.displacement);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double y[2] = {g.node(i), g.node(j)};
      double x[2] = {y[0], y[1]};
      double g0[2], g1[2];
      bool converged = false;
      for (int it = 0; it < 60 && !converged; ++it) {
        const double r0 = x[0] + evaluate_with_gradient(d, 0, x, g0) - y[0];
        const double r1 = x[1] + evaluate_with_gradient(d, 1, x, g1) - y[1];
        const double a = 1.0 + g0[0], b = g0[1], c = g1[0], e = 1.0 + g1[1];
        const double det = a * e - b * c;
        if (!(det > 0.0)) throw BreakdownError("map is not invertible: det(T eta) <= 0", det);
        const double dx0 = (e * r0 - b * r1) / det;
        const double dx1 = (a * r1 - c * r0) / det;
        x[0] -= dx0;
        x[1] -= dx1;
        converged = std::abs(dx0) + std::abs(dx1) < 1e-15 * (1.0 + std::abs(x[0]) + std::abs(x[1]));
      }
      if (!converged) throw BreakdownError("inversion of eta did not converge", 0.0);
      xs[static_cast<std::size_t>(i) * n + j] = {x[0], x[1]};
    }
  }
  return xs;
}

SpectralField eulerian_velocity(const DiffeoState& state) {
  const Grid& g = state.grid();
  const auto xs = invert_map(state);
  GridField u(g, g.dim());
  if (g.dim() == 1) {
    const Interp1D v(to_spectral(state.velocity));
    for (std::size_t j = 0; j < xs.size(); ++j) u.component(0)[j] = v.value(xs[j][0]);
    return to_spectral(u);
  }
  const SpectralField v = to_spectral(state.velocity);
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (int c = 0; c < 2; ++c) u.component(c)[j] = evaluate(v, c, xs[j]);
  return to_spectral(u);
}

GridField spray_1d(const DiffeoState& state, SprayForm form) {
  require_1d(state);
  require_consistent(state);
  const double a2 = state.alpha * state.alpha;
  if (a2 == 0.0) return spray_1d_alpha0(state);

  const Grid& g = state.grid();
  const std::size_t n = g.size();
  const GridField eta_x = jacobian_1d(state);
  require_orientation(eta_x);
  const GridField v_x = scalar_derivative(state.velocity);
  auto ex = eta_x.component(0);
  auto v = state.velocity.component(0);

  GridField q(g, 1);  // eta_x^{-1} d_x eta_t
  for (std::size_t i = 0; i < n; ++i) q.component(0)[i] = v_x.component(0)[i] / ex[i];
  const GridField q_x = scalar_derivative(q);

  const double s = form == SprayForm::Conservative ? -1.0 : 1.0;
  GridField r(g, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double lap_v = q_x.component(0)[i] / ex[i];
    r.component(0)[i] = (-2.0 * v[i] + s * a2 * lap_v) * q.component(0)[i];
  }

  // (1 - a^2 L)^{-1} r = [(1 - a^2 d_y^2)^{-1} (r o eta^{-1})] o eta
  const Interp1D d(to_spectral(state.displacement));
  const double dmax = state.displacement.max_abs();
  const Interp1D r_interp(to_spectral(r));
  GridField r_euler(g, 1);
  for (int j = 0; j < g.n(); ++j)
    r_euler.component(0)[j] = r_interp.value(invert_point(d, g.node(j), dmax));
  const Interp1D w(helmholtz_inverse(to_spectral(r_euler), state.alpha));

  GridField out(g, 1);
  auto disp = state.displacement.component(0);
  for (int i = 0; i < g.n(); ++i) out.component(0)[i] = w.value(g.node(i) + disp[i]);
  return out;
}

double lagrangian_energy(const DiffeoState& state) {
  require_1d(state);
  return 0.5 * h1_norm_at(state, state.velocity) * h1_norm_at(state, state.velocity);
}

double h1_norm_at(const DiffeoState& base, const GridField& w) {
  require_1d(base);
  const GridField eta_x = jacobian_1d(base);
  const GridField w_x = scalar_derivative(w);
  const double a2 = base.alpha * base.alpha;
  auto ex = eta_x.component(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const double wi = w.component(0)[i];
    const double q = w_x.component(0)[i] / ex[i];
    sum += (wi * wi + a2 * q * q) * ex[i];
  }
  return std::sqrt(sum * base.grid().spacing());
}

DiffeoState step_geodesic_1d(const DiffeoState& s, double dt, SprayForm form) {
  require_1d(s);
  auto at = [&](const GridField& d, const GridField& v) { return DiffeoState{d, v, s.alpha, s.time}; };
  const GridField& d0 = s.displacement;
  const GridField& v0 = s.velocity;

  const GridField a1 = spray_1d(s, form);
  const GridField d2 = d0 + (0.5 * dt) * v0, v2 = v0 + (0.5 * dt) * a1;
  const GridField a2 = spray_1d(at(d2, v2), form);
  const GridField d3 = d0 + (0.5 * dt) * v2, v3 = v0 + (0.5 * dt) * a2;
  const GridField a3 = spray_1d(at(d3, v3), form);
  const GridField d4 = d0 + dt * v3, v4 = v0 + dt * a3;
  const GridField a4 = spray_1d(at(d4, v4), form);

  GridField d = d0 + (dt / 6.0) * (v0 + 2.0 * v2 + 2.0 * v3 + v4);
  GridField v = v0 + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  if (!d.all_finite() || !v.all_finite())
    throw NonFiniteError("non-finite geodesic state at t = " + std::to_string(s.time + dt));
  return DiffeoState{filtered(d), filtered(v), s.alpha, s.time + dt};
}

GeodesicRun integrate_geodesic_1d(const DiffeoState& initial, double dt, double t_end,
                                  const GeodesicOptions& options) {
  require_1d(initial);
  require_consistent(initial);
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (!(t_end >= initial.time)) throw InvalidInput("t_end must not precede the initial time");
  if (options.cadence < 1) throw InvalidInput("cadence must be >= 1");

  GeodesicRun run;
  auto record = [&](const DiffeoState& s) {
    run.samples.push_back({s.time, min_jacobian(s), lagrangian_energy(s), s.velocity.max_abs()});
    if (options.keep_snapshots) run.snapshots.push_back(s);
  };
  DiffeoState state = initial;
  record(state);

  const double t0 = initial.time;
  const long steps = static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double target = n == steps ? t_end : t0 + n * dt;
    DiffeoState next = state;
    try {
      next = step_geodesic_1d(state, target - state.time, options.form);
    } catch (const BreakdownError& e) {
      run.breakdown_time = target;
      run.breakdown_min_jacobian = e.min_jacobian();
      return run;
    } catch (const NonFiniteError&) {
      run.breakdown_time = target;
      run.breakdown_min_jacobian = std::nan("");
      return run;
    }
    next.time = target;
    const double mj = min_jacobian(next);
    if (!(mj >= options.breakdown_threshold)) {
      run.breakdown_time = target;
      run.breakdown_min_jacobian = mj;
      return run;
    }
    state = std::move(next);
    if (n % options.cadence == 0 || n == steps) record(state);
  }
  return run;
}

double camassa_holm_residual(const SpectralField& u_prev, const SpectralField& u, const SpectralField& u_next,
                             double dt, double alpha) {
  if (u.grid().dim() != 1) throw InvalidInput("Camassa-Holm residual is defined in 1D");
  const SpectralField m = helmholtz_apply(u, alpha);
  const SpectralField m_t = helmholtz_apply((1.0 / (2.0 * dt)) * (u_next - u_prev), alpha);
  const GridField us = to_physical(u), u_y = to_physical(derivative(u, 0));
  const GridField ms = to_physical(m), m_y = to_physical(derivative(m, 0));
  GridField transport(u.grid(), 1);
  for (std::size_t i = 0; i < u.grid().size(); ++i)
    transport.component(0)[i] =
        us.component(0)[i] * m_y.component(0)[i] + 2.0 * u_y.component(0)[i] * ms.component(0)[i];
  return l2_norm(m_t + to_spectral(transport));
}

// ---------------------------------------------------------------------------

double GeodesicFamily::h(double s) const {
  const double x[1] = {s};
  return profile.evaluate(0, x);
}

double GeodesicFamily::dh(double s) const {
  double sum = 0.0;
  for (const auto& t : profile.terms()) {
    const double k = t.wavevector[0];
    sum += t.phase == Phase::Sin ? t.amplitude * k * std::cos(k * s) : -t.amplitude * k * std::sin(k * s);
  }
  return sum;
}

DiffeoState GeodesicFamily::state(const Grid& grid, double t, double alpha) const {
  if (grid.dim() != 2) throw InvalidInput("shear families live on T^2");
  const bool translating = kind == FamilyKind::Translating;
  GridField d = sample(grid, 2, [&](int c, std::span<const double> x) {
    if (translating) return c == 0 ? h(x[1]) : speed * t;
    return c == 0 ? t * h(x[1]) : 0.0;
  });
  GridField v = sample(grid, 2, [&](int c, std::span<const double> x) {
    if (translating) return c == 0 ? 0.0 : speed;
    return c == 0 ? h(x[1]) : 0.0;
  });
  return DiffeoState{std::move(d), std::move(v), alpha, t};
}

SpectralField GeodesicFamily::eulerian_velocity(const Grid& grid, double) const {
  if (grid.dim() != 2) throw InvalidInput("shear families live on T^2");
  TrigFieldSpec u(2, 2);
  if (kind == FamilyKind::Translating) {
    u.add(1, speed, {0, 0}, Phase::Cos);
  } else {
    for (const auto& term : profile.terms()) u.add(0, term.amplitude, {0, term.wavevector[0]}, term.phase);
  }
  return u.to_field(grid);
}

std::array<double, 4> GeodesicFamily::tangent_map(std::span<const double> x, double t) const {
  const double shear = kind == FamilyKind::Translating ? dh(x[1]) : t * dh(x[1]);
  return {1.0, shear, 0.0, 1.0};
}

double geodesic_residual(const SpectralField& u, const SpectralField& du_dt, double alpha) {
  return h1_norm(leray_project(du_dt) - rhs(u, alpha), alpha);
}

double geodesic_residual_2d(const GeodesicFamily& family, const Grid& grid, double t, double alpha) {
  const double dt = 1e-3;
  const SpectralField u = family.eulerian_velocity(grid, t);
  const SpectralField du =
      (0.5 / dt) * (family.eulerian_velocity(grid, t + dt) - family.eulerian_velocity(grid, t - dt));
  return geodesic_residual(u, du, alpha);
}

}  // namespace h1diff
