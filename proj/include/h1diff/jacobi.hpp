#pragma once

// Jacobi fields along geodesics, growth diagnostics and conjugate-point scans.
//
// 1D: Y is a Lagrangian tangent vector at eta(t). The Jacobi equation is the
// linearisation of the spray, taken by central differences, integrated with
// RK4 against a frozen base trajectory (cubic Hermite in time between
// snapshots, using eta_t and the spray as the time derivatives).
//
// 2D: fields are carried in the Eulerian frame xi = Y o eta^{-1}. With
// dU the variation of the Eulerian velocity,
//   xi_t = dU - U.grad xi + xi.grad U,   dU_t = D rhs(U)[dU],
// and the base U is advanced alongside with the same RK4 step.

#include <optional>
#include <utility>
#include <vector>

#include "h1diff/euler_alpha.hpp"
#include "h1diff/geodesics.hpp"

namespace h1diff {

/// Inner products sampled along a curve in a Hilbert space: norm2[i] = |Y_i|^2,
/// cross[i] = <Y_i, Y_{i+1}>. This is all the conjugate-point scanner needs.
struct GramSeries {
  std::vector<double> times;
  std::vector<double> norm2;
  std::vector<double> cross;
};

struct JacobiTrajectory {
  std::vector<double> times;
  std::vector<double> h1_norm;  // right-invariant ||Y||_1
  std::vector<double> l2_norm;
  std::vector<int> convexity;   // sign of the second difference of h1_norm at interior samples
  GramSeries gram;              // Eulerian inner products used by the scanner
  std::vector<GridField> y;     // 1D: Lagrangian Y (when fields are kept)
  std::vector<GridField> ydot;
  std::vector<SpectralField> xi;  // 2D: Eulerian Y o eta^{-1} (when fields are kept)
  std::vector<SpectralField> du;  // 2D: variation of the Eulerian velocity
};

struct JacobiOptions {
  double eps_rel = 1e-6;
  SprayForm form = SprayForm::Conservative;
  bool keep_fields = true;
  double convexity_tolerance = 1e-6;  // relative to max ||Y||_1
};

/// (Ydot, Yddot) with Yddot the central difference of the spray in direction
/// (Y, Ydot). eps = eps_rel * max(|eta_t|, 1) / max(|Y|, |Ydot|). If a
/// perturbed state folds, eps shrinks tenfold once before BreakdownError.
std::pair<GridField, GridField> linearized_spray(const DiffeoState& base, const GridField& y, const GridField& ydot,
                                                 double eps_rel = 1e-6, SprayForm form = SprayForm::Conservative);

/// Integrates along base.snapshots up to t_end (default: the last snapshot).
/// Throws InvalidInput if t_end lies beyond the base trajectory.
JacobiTrajectory integrate_jacobi(const GeodesicRun& base, const GridField& y0, const GridField& ydot0,
                                  std::optional<double> t_end = std::nullopt, const JacobiOptions& options = {});

/// D rhs(U)[dU] by central difference (exact up to rounding, rhs is quadratic).
SpectralField linearized_rhs(const SpectralField& u, const SpectralField& du, double alpha);

/// Eulerian Jacobi field along the Euler-alpha flow from `base`. ydot0 is the
/// initial Lagrangian velocity of Y; both fields must be divergence-free.
JacobiTrajectory integrate_jacobi_2d(const FlowState& base, const SpectralField& xi0, const SpectralField& ydot0,
                                     double dt, double t_end, int cadence = 1, const JacobiOptions& options = {});

/// Shortcut for the shear families, whose Eulerian velocity is steady.
JacobiTrajectory integrate_jacobi_family(const GeodesicFamily& family, const Grid& grid, double alpha,
                                         const SpectralField& xi0, const SpectralField& ydot0, double dt,
                                         double t_end, int cadence = 1, const JacobiOptions& options = {});

struct StabilityReport {
  double min_second_difference = 0.0;
  double max_second_difference = 0.0;
  double max_norm = 0.0;
  double final_norm = 0.0;
  bool convex = true;             // every interior second difference >= -tol * max_norm
  double growth_coefficient = 0.0;  // least-squares c in ||Y(t)|| ~ c t
  double lower_bound_slope = 0.0;   // min over t > 0 of ||Y(t)|| / t
};

StabilityReport stability_report(const JacobiTrajectory& traj, double tolerance = 1e-6);

/// Second differences of h1_norm at the interior samples, scaled to the mean
/// local step (zero for a trace that is linear in t).
std::vector<double> second_differences(const JacobiTrajectory& traj);

struct ConjugateCandidate {
  std::size_t direction = 0;
  double time = 0.0;
  double ratio = 0.0;  // min |Y| on the segment over the running max
};

struct ConjugateScan {
  std::vector<ConjugateCandidate> candidates;
  std::vector<double> min_ratio;  // per direction, over t > 0
};

/// Threshold on |Y| relative to its running maximum.
inline constexpr double kConjugateThreshold = 1e-6;

/// Scans sampled Jacobi fields for interior zeros: on every segment after the
/// first, the minimum of |Y| along the chord between consecutive samples
/// (computed from the Gram data) is compared with the running maximum.
ConjugateScan scan_conjugate(const std::vector<GramSeries>& series, double threshold = kConjugateThreshold);

/// Integrates Y(0) = 0, Ydot(0) = direction for each direction and scans.
ConjugateScan conjugate_point_scan(const GeodesicRun& base, const std::vector<GridField>& directions,
                                   const JacobiOptions& options = {});
ConjugateScan conjugate_point_scan_2d(const FlowState& base, const std::vector<SpectralField>& directions,
                                      double dt, double t_end, const JacobiOptions& options = {});

/// Control case for the scanner: the Jacobi field along a great circle of the
/// unit sphere in R^3, obtained by linearising the geodesic equation
/// x'' = -|x'|^2 x by central differences. Its first conjugate time is pi.
GramSeries sphere_jacobi_series(double dt, double t_end);

/// Deviation study: for each eps, sup_t ||(eta_eps - eta)/eps - Y||_1 where
/// eta_eps starts from velocity u0 + eps v and Y is the Jacobi field with
/// Y(0) = 0, Ydot(0) = v. order is the least-squares slope in log-log.
struct DeviationStudy {
  std::vector<double> eps;
  std::vector<double> error;
  double order = 0.0;
};

DeviationStudy deviation_study(const DiffeoState& initial, const GridField& direction, double dt, double t_end,
                               const std::vector<double>& eps, const JacobiOptions& options = {});

}  // namespace h1diff
