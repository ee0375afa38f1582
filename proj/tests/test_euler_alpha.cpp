#include <cmath>

#include "doctest.h"
#include "h1diff/errors.hpp"
#include "h1diff/euler_alpha.hpp"
#include "oracles.hpp"

using namespace h1diff;
using oracle::pi;

namespace {

SpectralField shear(const Grid& g, double amp = 1.0) {
  return to_spectral(sample(g, 2, [amp](int c, auto x) { return c == 0 ? amp * std::sin(x[1]) : 0.0; }));
}

double rel_l2(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b) / l2_norm(b); }

}  // namespace

TEST_CASE("rhs of zero and of eigenfunction steady states") {
  const Grid g(2, 32);
  for (double a : {0.0, 0.5, 1.0}) {
    CHECK(rhs(SpectralField(g, 2), a).max_abs_coefficient() == 0.0);
    CHECK(rhs(shear(g), a).max_abs_coefficient() < 1e-10);
    CHECK(rhs(taylor_green(g), a).max_abs_coefficient() < 1e-10);
    // the unprojected bracket is not zero, it is a pure gradient
    auto f = momentum_tendency(taylor_green(g), a);
    CHECK(f.max_abs_coefficient() > 0.1);
    CHECK(leray_project(f).max_abs_coefficient() < 1e-12);
  }
}

TEST_CASE("rhs output is divergence-free and rejects compressible input") {
  const Grid g(2, 32);
  auto u = random_divergence_free(g, 3, 5);
  CHECK(relative_divergence(rhs(u, 1.0)) < 1e-12);
  auto bad = to_spectral(sample(g, 2, [](int c, auto x) { return c == 0 ? std::sin(x[0]) : 0.0; }));
  CHECK_THROWS_AS(rhs(bad, 1.0), InvalidInput);
}

TEST_CASE("alpha = 0 reduces to incompressible Euler") {
  const Grid g(2, 32);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto u = random_divergence_free(g, seed, 6);
    CHECK(oracle::rel_diff(rhs(u, 0.0), euler_rhs(u)) < 1e-12);
  }
}

TEST_CASE("projection commutes with the Helmholtz inverse") {
  const Grid g(2, 32);
  auto u = random_divergence_free(g, 8, 6);
  auto f = momentum_tendency(u, 0.7);
  CHECK(oracle::rel_diff(leray_project(helmholtz_inverse(f, 0.7)), helmholtz_inverse(leray_project(f), 0.7)) <
        1e-14);
}

TEST_CASE("energy") {
  const Grid g(2, 32);
  CHECK(h1_energy({SpectralField(g, 2), 1.0, 0.0}) == 0.0);
  auto x = to_spectral(sample(g, 2, [](int c, auto p) { return c == 0 ? std::sin(p[0]) : 0.0; }));
  CHECK(h1_energy({x, 1.0, 0.0}) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
  CHECK(h1_energy({random_divergence_free(g, 1, 4), 0.3, 0.0}) > 0.0);
}

TEST_CASE("step_rk4 on zero and steady states") {
  const Grid g(2, 32);
  FlowState zero{SpectralField(g, 2), 1.0, 0.0};
  auto z1 = step_rk4(zero, 1e-2);
  CHECK(z1.velocity.max_abs_coefficient() == 0.0);
  CHECK(z1.time == doctest::Approx(1e-2));

  FlowState s{shear(g), 1.0, 0.0};
  auto run = integrate_flow(s, 1e-3, 1.0, 100);
  CHECK(oracle::max_diff(to_physical(run.final_state.velocity), to_physical(s.velocity)) < 1e-8);
  CHECK(run.final_state.time == doctest::Approx(1.0));
  CHECK(run.series.size() == 11);
}

TEST_CASE("step_rk4 flags CFL violations and rejects bad dt") {
  const Grid g(2, 32);
  FlowState s{shear(g, 10.0), 1.0, 0.0};
  bool violated = false;
  step_rk4(s, 0.1, {}, &violated);
  CHECK(violated);
  step_rk4(s, 1e-4, {}, &violated);
  CHECK_FALSE(violated);
  CHECK_THROWS_AS(step_rk4(s, 0.0), InvalidInput);
  CHECK_THROWS_AS(integrate_flow(s, -1.0, 1.0), InvalidInput);
}

TEST_CASE("step_rk4 aborts on non-finite data") {
  const Grid g(2, 16);
  FlowState s{shear(g, 1e200), 1.0, 0.0};
  CHECK_THROWS_AS(step_rk4(s, 1e100), NonFiniteError);
}

TEST_CASE("energy conservation and divergence over t in [0, 1]") {
  const Grid g(2, 64);
  for (double a : {0.0, 0.5, 1.0}) {
    FlowState s{random_divergence_free(g, 2024, 4), a, 0.0};
    auto run = integrate_flow(s, 1e-3, 1.0, 50);
    const double e0 = run.series.front().h1_energy;
    double drift = 0.0, div = 0.0;
    for (const auto& d : run.series) {
      drift = std::max(drift, std::abs(d.h1_energy - e0) / e0);
      div = std::max(div, d.max_divergence);
    }
    CAPTURE(a);
    CHECK(drift <= 1e-8);
    CHECK(div <= 1e-10);
    CHECK(run.cfl_warnings == 0);
  }
}

TEST_CASE("fourth-order convergence in dt") {
  const Grid g(2, 32);
  FlowState s{random_divergence_free(g, 77, 3), 0.5, 0.0};
  const double t_end = 1.0;
  const double dt = 0.1;
  const auto ref = integrate_flow(s, dt / 8, t_end, 1000).final_state.velocity;
  const double e1 = l2_norm(integrate_flow(s, dt, t_end, 1000).final_state.velocity - ref);
  const double e2 = l2_norm(integrate_flow(s, dt / 2, t_end, 1000).final_state.velocity - ref);
  const double order = std::log2(e1 / e2);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(order >= 3.7);
}

TEST_CASE("time reversibility") {
  const Grid g(2, 32);
  FlowState s{random_divergence_free(g, 5, 4), 1.0, 0.0};
  FlowState fwd = s;
  for (int n = 0; n < 500; ++n) fwd = step_rk4(fwd, 1e-3);
  for (int n = 0; n < 500; ++n) fwd = step_rk4(fwd, -1e-3);
  CHECK(rel_l2(fwd.velocity, s.velocity) < 1e-7);
}

TEST_CASE("pressure") {
  const Grid g(2, 32);
  CHECK(pressure(SpectralField(g, 2), 1.0).max_abs() == 0.0);
  auto constant = to_spectral(sample(g, 2, [](int c, auto) { return c == 0 ? 0.3 : -1.2; }));
  CHECK(pressure(constant, 1.0).max_abs() < 1e-15);

  // Steady Taylor-Green at alpha = 0: grad p = -(U.grad)U = -(1/2)(sin 2x1, sin 2x2),
  // so p = (1/4)(cos 2x1 + cos 2x2) in the zero-mean gauge.
  auto p = pressure(taylor_green(g), 0.0);
  CHECK(oracle::max_error(p, [](int, auto x) { return 0.25 * (std::cos(2 * x[0]) + std::cos(2 * x[1])); }) <
        1e-14);

  auto u = random_divergence_free(g, 4, 5);
  auto grad_p = gradient(to_spectral(pressure(u, 0.8)));
  CHECK(oracle::rel_diff(grad_p, gradient_part(momentum_tendency(u, 0.8))) < 1e-10);
}
