#pragma once

// Lagrangian side: geodesics of the H^1 metric on Diff(S^1) via the geodesic
// spray, conversion to Eulerian velocity, and the two shear families of
// pressure-constant geodesics on T^2.
//
// A configuration is eta(x) = x + d(x) with d periodic. In 1D the spray is
//
//   eta_tt = (1 - a^2 L)^{-1} [ (-2 eta_t + s a^2 L eta_t) eta_x^{-1} d_x eta_t ],
//   L = eta_x^{-1} d_x (eta_x^{-1} d_x),
//
// with s = -1 (SprayForm::Conservative, the Camassa-Holm geodesic equation)
// or s = +1 (SprayForm::Published, the formula as printed). L is the pullback
// of d_y^2 by eta, so the solve is done on the Eulerian grid and composed back.

#include <array>
#include <optional>
#include <vector>

#include "h1diff/spectral_field.hpp"
#include "h1diff/trig_spec.hpp"

namespace h1diff {

enum class SprayForm { Conservative, Published };

/// Minimum eta_x below which integration declares the map broken down.
inline constexpr double kBreakdownThreshold = 1e-3;

struct DiffeoState {
  GridField displacement;  // d, one component per axis
  GridField velocity;      // eta_t
  double alpha = 1.0;
  double time = 0.0;

  const Grid& grid() const noexcept { return displacement.grid(); }
};

/// eta = id, eta_t = u0 sampled on the grid.
DiffeoState identity_state(const Grid& grid, const GridField& velocity, double alpha);

/// min over nodes of eta_x (1D only).
double min_jacobian(const DiffeoState& state);

/// Spray acceleration. Throws BreakdownError if eta_x <= 0 anywhere.
GridField spray_1d(const DiffeoState& state, SprayForm form = SprayForm::Conservative);

/// Closed form at alpha = 0: -2 eta_x^{-1} d_x(eta_t) eta_t.
GridField spray_1d_alpha0(const DiffeoState& state);

/// Solves eta(x) = y for x at every Eulerian node y_j (1D Newton with bisection
/// safeguard, 2D Newton). Throws BreakdownError if eta is not invertible.
std::vector<std::array<double, 2>> invert_map(const DiffeoState& state);

/// U = eta_t o eta^{-1} sampled at the Eulerian nodes.
SpectralField eulerian_velocity(const DiffeoState& state);

/// (1/2) int (u^2 + a^2 u_y^2) dy, evaluated in Lagrangian form
/// (1/2) int (eta_t^2 + a^2 (eta_tx / eta_x)^2) eta_x dx.
double lagrangian_energy(const DiffeoState& state);

/// Right-invariant H^1 norm of a tangent vector W at eta (1D):
/// ||W o eta^{-1}||_1 computed in Lagrangian form.
double h1_norm_at(const DiffeoState& base, const GridField& w);

struct GeodesicSample {
  double time = 0.0;
  double min_jacobian = 0.0;
  double h1_energy = 0.0;
  double max_speed = 0.0;
};

struct GeodesicRun {
  std::vector<DiffeoState> snapshots;  // at the recorded times
  std::vector<GeodesicSample> samples;
  std::optional<double> breakdown_time;
  double breakdown_min_jacobian = 0.0;
};

struct GeodesicOptions {
  SprayForm form = SprayForm::Conservative;
  int cadence = 1;
  bool keep_snapshots = true;
  double breakdown_threshold = kBreakdownThreshold;
};

/// One RK4 step of (d, eta_t). The result is filtered to the grid's band.
DiffeoState step_geodesic_1d(const DiffeoState& state, double dt, SprayForm form = SprayForm::Conservative);

/// RK4 integration to t_end. Stops at the first step whose result has
/// min eta_x below the threshold (or whose stages break down) and reports it.
GeodesicRun integrate_geodesic_1d(const DiffeoState& initial, double dt, double t_end,
                                  const GeodesicOptions& options = {});

/// L2 norm of m_t + u m_y + 2 u_y m with m = H_a u, using a centred time
/// difference of three Eulerian velocities spaced dt apart.
double camassa_holm_residual(const SpectralField& u_prev, const SpectralField& u, const SpectralField& u_next,
                             double dt, double alpha);

// ---------------------------------------------------------------------------
// Shear families on T^2

enum class FamilyKind { Translating, Shearing };

/// Translating: eta_t(x) = (x1 + h(x2), x2 + c t).  Shearing: eta_t(x) = (x1 + t h(x2), x2).
struct GeodesicFamily {
  FamilyKind kind = FamilyKind::Shearing;
  TrigFieldSpec profile{1, 1};  // h, a scalar spec in one variable
  double speed = 0.0;           // c, Translating only

  double h(double s) const;
  double dh(double s) const;

  DiffeoState state(const Grid& grid, double t, double alpha) const;
  /// Closed form of eta_t o eta^{-1}.
  SpectralField eulerian_velocity(const Grid& grid, double t) const;
  /// Tangent map T eta_t at x (row-major 2x2).
  std::array<double, 4> tangent_map(std::span<const double> x, double t) const;
};

/// || P(dU/dt) - rhs(U) ||_{H^1}: zero iff U solves the Euler-alpha equations.
double geodesic_residual(const SpectralField& u, const SpectralField& du_dt, double alpha);

/// Residual of a family at time t, with dU/dt from a centred difference of the
/// closed-form Eulerian velocity.
double geodesic_residual_2d(const GeodesicFamily& family, const Grid& grid, double t, double alpha);

}  // namespace h1diff
