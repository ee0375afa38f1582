#pragma once

// Averaged Euler (Euler-alpha) equations on T^2 in velocity form:
//
//   dU/dt = P H_a^{-1} [ -(U.grad) V + a^2 (grad U)^T Lap U ],   V = H_a U,
//
// where ((grad U)^T W)_j = sum_i W_i d_j U_i. At a = 0 this is incompressible
// Euler, dU/dt = -P (U.grad U).

#include <functional>
#include <vector>

#include "h1diff/spectral_field.hpp"

namespace h1diff {

struct FlowState {
  SpectralField velocity;
  double alpha = 1.0;
  double time = 0.0;
};

struct FlowDiagnostics {
  double time = 0.0;
  double h1_energy = 0.0;
  double l2_energy = 0.0;
  double max_divergence = 0.0;  // relative, see relative_divergence
  double max_velocity = 0.0;
};

struct StepOptions {
  double cfl = 0.5;
  bool reproject = true;
};

/// Unprojected momentum tendency F = -(U.grad)V + a^2 (grad U)^T Lap U.
SpectralField momentum_tendency(const SpectralField& u, double alpha);

/// Velocity tendency P H_a^{-1} F. Requires U divergence-free (1e-10 relative).
SpectralField rhs(const SpectralField& u, double alpha);

/// Reference incompressible Euler tendency -P(U.grad U), computed directly.
SpectralField euler_rhs(const SpectralField& u);

/// One classical RK4 step followed by Leray re-projection. Sets *cfl_violated
/// when dt > cfl * dx / max|U|. Throws NonFiniteError on NaN/Inf. Negative dt
/// integrates backwards.
FlowState step_rk4(const FlowState& state, double dt, const StepOptions& options = {},
                   bool* cfl_violated = nullptr);

/// (1/2) h1_inner(U, U, alpha).
double h1_energy(const FlowState& state);
double l2_energy(const FlowState& state);

/// Pressure p = Lap^{-1} div F in the zero-mean gauge, so grad p = Q F.
GridField pressure(const SpectralField& u, double alpha);

FlowDiagnostics diagnose(const FlowState& state);

struct FlowRun {
  FlowState final_state;
  std::vector<FlowDiagnostics> series;
  int cfl_warnings = 0;
};

/// Fixed-step integration to t_end (the last step is shortened to land on it).
/// Diagnostics are recorded at t = 0, every `cadence` steps, and at the end.
/// on_sample, if set, also receives the state at each recorded time.
FlowRun integrate_flow(FlowState state, double dt, double t_end, int cadence = 1,
                       const StepOptions& options = {},
                       const std::function<void(const FlowState&)>& on_sample = {});

/// Taylor-Green vortex (sin x1 cos x2, -cos x1 sin x2), times amplitude.
SpectralField taylor_green(const Grid& grid, double amplitude = 1.0);

}  // namespace h1diff
