#include "h1diff/euler_alpha.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "h1diff/errors.hpp"

namespace h1diff {

namespace {

void require_flow_field(const SpectralField& u) {
  if (u.grid().dim() != 2 || u.components() != 2)
    throw InvalidInput("Euler-alpha velocity must be a 2-component field on a 2D grid");
  if (relative_divergence(u) > 1e-10)
    throw InvalidInput("Euler-alpha velocity must be divergence-free");
}

// Physical samples of d_j of every component: out[i][j] = d_j f_i.
std::vector<std::vector<GridField>> jacobian_samples(const SpectralField& f) {
  std::vector<std::vector<GridField>> out(f.components());
  for (int i = 0; i < f.components(); ++i) {
    const auto fi = component(f, i);
    for (int j = 0; j < f.grid().dim(); ++j) out[i].push_back(to_physical(derivative(fi, j)));
  }
  return out;
}

void accumulate_product(std::span<double> out, std::span<const double> a, std::span<const double> b,
                        double scale) {
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += scale * a[n] * b[n];
}

}  // namespace

SpectralField momentum_tendency(const SpectralField& u, double alpha) {
  if (u.grid().dim() != 2 || u.components() != 2)
    throw InvalidInput("Euler-alpha velocity must be a 2-component field on a 2D grid");
  const Grid& g = u.grid();
  const double a2 = alpha * alpha;
  const GridField us = to_physical(u);
  const auto dv = jacobian_samples(helmholtz_apply(u, alpha));

  GridField f(g, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) accumulate_product(f.component(i), us.component(j), dv[i][j].component(0), -1.0);

  if (a2 != 0.0) {
    const auto du = jacobian_samples(u);
    const GridField lap = to_physical(laplacian(u));
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) accumulate_product(f.component(j), lap.component(i), du[i][j].component(0), a2);
  }
  if (!f.all_finite()) throw NonFiniteError("non-finite momentum tendency");
  return to_spectral(f);
}

SpectralField rhs(const SpectralField& u, double alpha) {
  require_flow_field(u);
  return leray_project(helmholtz_inverse(momentum_tendency(u, alpha), alpha));
}

SpectralField euler_rhs(const SpectralField& u) {
  require_flow_field(u);
  const GridField us = to_physical(u);
  GridField adv(u.grid(), 2);
  for (int i = 0; i < 2; ++i) {
    const auto ui = component(u, i);
    for (int j = 0; j < 2; ++j)
      accumulate_product(adv.component(i), us.component(j), to_physical(derivative(ui, j)).component(0), 1.0);
  }
  return -leray_project(to_spectral(adv));
}

FlowState step_rk4(const FlowState& state, double dt, const StepOptions& options, bool* cfl_violated) {
  if (!std::isfinite(dt) || dt == 0.0) throw InvalidInput("time step must be finite and nonzero");
  if (!(state.alpha >= 0.0) || !std::isfinite(state.alpha)) throw InvalidInput("alpha must be finite and >= 0");
  const SpectralField& u0 = state.velocity;
  if (cfl_violated) {
    const double umax = to_physical(u0).max_abs();
    *cfl_violated = umax > 0.0 && std::abs(dt) > options.cfl * u0.grid().spacing() / umax;
  }

  const double a = state.alpha;
  const auto k1 = rhs(u0, a);
  const auto k2 = rhs(u0 + (0.5 * dt) * k1, a);
  const auto k3 = rhs(u0 + (0.5 * dt) * k2, a);
  const auto k4 = rhs(u0 + dt * k3, a);
  SpectralField u1 = u0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (options.reproject) u1 = leray_project(u1);
  if (!u1.all_finite())
    throw NonFiniteError("non-finite velocity after step at t = " + std::to_string(state.time + dt));
  return FlowState{std::move(u1), a, state.time + dt};
}

double h1_energy(const FlowState& state) { return 0.5 * h1_inner(state.velocity, state.velocity, state.alpha); }

double l2_energy(const FlowState& state) { return 0.5 * l2_inner(state.velocity, state.velocity); }

GridField pressure(const SpectralField& u, double alpha) {
  require_flow_field(u);
  return to_physical(inverse_laplacian(divergence(momentum_tendency(u, alpha))));
}

FlowDiagnostics diagnose(const FlowState& state) {
  FlowDiagnostics d;
  d.time = state.time;
  d.h1_energy = h1_energy(state);
  d.l2_energy = l2_energy(state);
  d.max_divergence = relative_divergence(state.velocity);
  d.max_velocity = to_physical(state.velocity).max_abs();
  return d;
}

FlowRun integrate_flow(FlowState state, double dt, double t_end, int cadence, const StepOptions& options,
                       const std::function<void(const FlowState&)>& on_sample) {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (!(t_end >= state.time)) throw InvalidInput("t_end must not precede the initial time");
  if (cadence < 1) throw InvalidInput("cadence must be >= 1");

  FlowRun run{state, {}, 0};
  auto record = [&](const FlowState& s) {
    run.series.push_back(diagnose(s));
    if (on_sample) on_sample(s);
  };
  record(state);

  const double t0 = state.time;
  const long steps = static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double target = n == steps ? t_end : t0 + n * dt;
    bool violated = false;
    state = step_rk4(state, target - state.time, options, &violated);
    state.time = target;
    if (violated) ++run.cfl_warnings;
    if (n % cadence == 0 || n == steps) record(state);
  }
  run.final_state = std::move(state);
  return run;
}

SpectralField taylor_green(const Grid& grid, double amplitude) {
  if (grid.dim() != 2) throw InvalidInput("Taylor-Green needs a 2D grid");
  return to_spectral(sample(grid, 2, [amplitude](int c, std::span<const double> x) {
    return c == 0 ? amplitude * std::sin(x[0]) * std::cos(x[1]) : -amplitude * std::cos(x[0]) * std::sin(x[1]);
  }));
}

}  // namespace h1diff
