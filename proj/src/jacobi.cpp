#include "h1diff/jacobi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "h1diff/curvature.hpp"
#include "h1diff/errors.hpp"

namespace h1diff {
namespace {

GridField filtered(const GridField& f) { return to_physical(to_spectral(f)); }

double sup(const GridField& f) { return f.max_abs(); }

int sign_with_tolerance(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

// Second difference scaled to a uniform step, so that a linear trace gives zero
// even across a shorter final step.
double second_difference(const std::vector<double>& t, const std::vector<double>& n, std::size_t i) {
  const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
  const double hm = 0.5 * (h1 + h2);
  return 2.0 * ((n[i + 1] - n[i]) / h2 - (n[i] - n[i - 1]) / h1) / (h1 + h2) * hm * hm;
}

void fill_convexity(JacobiTrajectory& traj, double tol_rel) {
  traj.convexity.clear();
  if (traj.h1_norm.size() < 3) return;
  const double tol = tol_rel * *std::max_element(traj.h1_norm.begin(), traj.h1_norm.end());
  for (std::size_t i = 1; i + 1 < traj.h1_norm.size(); ++i)
    traj.convexity.push_back(sign_with_tolerance(second_difference(traj.times, traj.h1_norm, i), tol));
}

// Appends an Eulerian sample to the Gram series.
void push_gram(GramSeries& g, double t, const SpectralField& xi, std::optional<SpectralField>& prev, double alpha) {
  g.times.push_back(t);
  g.norm2.push_back(h1_inner(xi, xi, alpha));
  if (prev) g.cross.push_back(h1_inner(*prev, xi, alpha));
  prev = xi;
}

DiffeoState with_alpha(DiffeoState s, double alpha) {
  s.alpha = alpha;
  return s;
}

}  // namespace

std::pair<GridField, GridField> linearized_spray(const DiffeoState& base, const GridField& y, const GridField& ydot,
                                                 double eps_rel, SprayForm form) {
  if (!(eps_rel > 0.0)) throw InvalidInput("linearized_spray: eps must be positive");
  if (base.grid().dim() != 1) throw InvalidInput("linearized_spray: 1D only");
  const double scale = std::max(sup(y), sup(ydot));
  if (scale == 0.0) return {ydot, GridField(base.grid(), 1)};
  double eps = eps_rel * std::max(sup(base.velocity), 1.0) / scale;
  for (int attempt = 0;; ++attempt) {
    try {
      const DiffeoState plus{base.displacement + eps * y, base.velocity + eps * ydot, base.alpha, base.time};
      const DiffeoState minus{base.displacement - eps * y, base.velocity - eps * ydot, base.alpha, base.time};
      GridField acc = spray_1d(plus, form) - spray_1d(minus, form);
      acc *= 1.0 / (2.0 * eps);
      return {ydot, std::move(acc)};
    } catch (const BreakdownError&) {
      if (attempt == 1) throw;
      eps *= 0.1;
    }
  }
}

JacobiTrajectory integrate_jacobi(const GeodesicRun& base, const GridField& y0, const GridField& ydot0,
                                  std::optional<double> t_end, const JacobiOptions& options) {
  const auto& snaps = base.snapshots;
  if (snaps.size() < 2) throw InvalidInput("integrate_jacobi: base trajectory needs at least two snapshots");
  const double t_last = snaps.back().time;
  const double t_stop = t_end.value_or(t_last);
  if (t_stop > t_last + 1e-12)
    throw InvalidInput("integrate_jacobi: t_end = " + std::to_string(t_stop) + " exceeds the base trajectory (" +
                       std::to_string(t_last) + ")");
  if (!(y0.grid() == snaps.front().grid()) || !(ydot0.grid() == snaps.front().grid()))
    throw InvalidInput("integrate_jacobi: initial data on a different grid");

  const double alpha = snaps.front().alpha;
  std::vector<std::optional<GridField>> spray_cache(snaps.size());
  auto spray_at = [&](std::size_t i) -> const GridField& {
    if (!spray_cache[i]) spray_cache[i] = spray_1d(snaps[i], options.form);
    return *spray_cache[i];
  };

  JacobiTrajectory traj;
  std::optional<SpectralField> prev;
  auto record = [&](std::size_t i, const GridField& y, const GridField& yd) {
    traj.times.push_back(snaps[i].time);
    traj.h1_norm.push_back(h1_norm_at(snaps[i], y));
    traj.l2_norm.push_back(h1_norm_at(with_alpha(snaps[i], 0.0), y));
    const DiffeoState carrier{snaps[i].displacement, y, alpha, snaps[i].time};
    push_gram(traj.gram, snaps[i].time, eulerian_velocity(carrier), prev, alpha);
    if (options.keep_fields) {
      traj.y.push_back(y);
      traj.ydot.push_back(yd);
    }
  };

  GridField y = y0, yd = ydot0;
  record(0, y, yd);
  for (std::size_t i = 0; i + 1 < snaps.size() && snaps[i + 1].time <= t_stop + 1e-12; ++i) {
    const DiffeoState& s0 = snaps[i];
    const DiffeoState& s1 = snaps[i + 1];
    const double h = s1.time - s0.time;
    const DiffeoState mid{0.5 * (s0.displacement + s1.displacement) + (h / 8.0) * (s0.velocity - s1.velocity),
                          0.5 * (s0.velocity + s1.velocity) + (h / 8.0) * (spray_at(i) - spray_at(i + 1)), alpha,
                          s0.time + 0.5 * h};
    auto f = [&](const DiffeoState& b, const GridField& p, const GridField& q) {
      return linearized_spray(b, p, q, options.eps_rel, options.form);
    };
    const auto [k1y, k1v] = f(s0, y, yd);
    const auto [k2y, k2v] = f(mid, y + (0.5 * h) * k1y, yd + (0.5 * h) * k1v);
    const auto [k3y, k3v] = f(mid, y + (0.5 * h) * k2y, yd + (0.5 * h) * k2v);
    const auto [k4y, k4v] = f(s1, y + h * k3y, yd + h * k3v);
    y = filtered(y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y));
    yd = filtered(yd + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v));
    if (!y.all_finite() || !yd.all_finite())
      throw NonFiniteError("non-finite Jacobi field at t = " + std::to_string(s1.time));
    record(i + 1, y, yd);
  }
  fill_convexity(traj, options.convexity_tolerance);
  return traj;
}

SpectralField linearized_rhs(const SpectralField& u, const SpectralField& du, double alpha) {
  const double s = du.max_abs_coefficient();
  if (s == 0.0) return SpectralField(u.grid(), u.components());
  const double eps = std::max(u.max_abs_coefficient(), 1.0) / s;
  SpectralField d = rhs(u + eps * du, alpha) - rhs(u - eps * du, alpha);
  d *= 1.0 / (2.0 * eps);
  return d;
}

JacobiTrajectory integrate_jacobi_2d(const FlowState& base, const SpectralField& xi0, const SpectralField& ydot0,
                                     double dt, double t_end, int cadence, const JacobiOptions& options) {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (!(t_end >= base.time)) throw InvalidInput("t_end must not precede the initial time");
  if (cadence < 1) throw InvalidInput("cadence must be >= 1");
  for (const auto* f : {&xi0, &ydot0}) {
    if (!(f->grid() == base.velocity.grid()) || f->components() != 2)
      throw InvalidInput("integrate_jacobi_2d: fields must be vector fields on the base grid");
    if (relative_divergence(*f) > 1e-10) throw InvalidInput("integrate_jacobi_2d: fields must be divergence-free");
  }
  const double alpha = base.alpha;
  struct Triple {
    SpectralField u, xi, du;
  };
  auto tendency = [&](const Triple& s) {
    return Triple{rhs(s.u, alpha), s.du - lie_bracket(s.u, s.xi), linearized_rhs(s.u, s.du, alpha)};
  };
  auto axpy = [](const Triple& s, double h, const Triple& k) {
    return Triple{s.u + h * k.u, s.xi + h * k.xi, s.du + h * k.du};
  };

  // Ydot(0) = dU(0) + xi(0).grad U(0)
  Triple state{base.velocity, xi0, ydot0 - directional(xi0, base.velocity)};
  double t = base.time;

  JacobiTrajectory traj;
  std::optional<SpectralField> prev;
  auto record = [&](const Triple& s) {
    traj.times.push_back(t);
    traj.h1_norm.push_back(h1_norm(s.xi, alpha));
    traj.l2_norm.push_back(l2_norm(s.xi));
    push_gram(traj.gram, t, s.xi, prev, alpha);
    if (options.keep_fields) {
      traj.xi.push_back(s.xi);
      traj.du.push_back(s.du);
    }
  };
  record(state);

  const long steps = static_cast<long>(std::ceil((t_end - base.time) / dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double target = n == steps ? t_end : base.time + n * dt;
    const double h = target - t;
    const Triple k1 = tendency(state);
    const Triple k2 = tendency(axpy(state, 0.5 * h, k1));
    const Triple k3 = tendency(axpy(state, 0.5 * h, k2));
    const Triple k4 = tendency(axpy(state, h, k3));
    Triple next = axpy(axpy(axpy(axpy(state, h / 6.0, k1), h / 3.0, k2), h / 3.0, k3), h / 6.0, k4);
    state = Triple{leray_project(next.u), leray_project(next.xi), leray_project(next.du)};
    if (!state.u.all_finite() || !state.xi.all_finite() || !state.du.all_finite())
      throw NonFiniteError("non-finite Jacobi field at t = " + std::to_string(target));
    t = target;
    if (n % cadence == 0 || n == steps) record(state);
  }
  fill_convexity(traj, options.convexity_tolerance);
  return traj;
}

JacobiTrajectory integrate_jacobi_family(const GeodesicFamily& family, const Grid& grid, double alpha,
                                         const SpectralField& xi0, const SpectralField& ydot0, double dt,
                                         double t_end, int cadence, const JacobiOptions& options) {
  const FlowState base{family.eulerian_velocity(grid, 0.0), alpha, 0.0};
  return integrate_jacobi_2d(base, xi0, ydot0, dt, t_end, cadence, options);
}

StabilityReport stability_report(const JacobiTrajectory& traj, double tolerance) {
  if (traj.h1_norm.empty()) throw InvalidInput("stability_report: empty trajectory");
  const auto& t = traj.times;
  const auto& n = traj.h1_norm;
  StabilityReport r;
  r.max_norm = *std::max_element(n.begin(), n.end());
  r.final_norm = n.back();
  if (n.size() >= 3) {
    r.min_second_difference = std::numeric_limits<double>::infinity();
    r.max_second_difference = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n.size(); ++i) {
      const double d2 = second_difference(t, n, i);
      r.min_second_difference = std::min(r.min_second_difference, d2);
      r.max_second_difference = std::max(r.max_second_difference, d2);
    }
    r.convex = r.min_second_difference >= -tolerance * r.max_norm;
  }
  double stn = 0.0, stt = 0.0;
  r.lower_bound_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double ti = t[i] - t.front();
    stn += ti * n[i];
    stt += ti * ti;
    if (ti > 0.0) r.lower_bound_slope = std::min(r.lower_bound_slope, n[i] / ti);
  }
  r.growth_coefficient = stt > 0.0 ? stn / stt : 0.0;
  if (!std::isfinite(r.lower_bound_slope)) r.lower_bound_slope = 0.0;
  return r;
}

std::vector<double> second_differences(const JacobiTrajectory& traj) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < traj.h1_norm.size(); ++i) out.push_back(second_difference(traj.times, traj.h1_norm, i));
  return out;
}

ConjugateScan scan_conjugate(const std::vector<GramSeries>& series, double threshold) {
  ConjugateScan out;
  for (std::size_t d = 0; d < series.size(); ++d) {
    const auto& g = series[d];
    if (g.norm2.size() != g.times.size() || (!g.times.empty() && g.cross.size() + 1 != g.times.size()))
      throw InvalidInput("scan_conjugate: inconsistent Gram series");
    double running = g.norm2.empty() ? 0.0 : std::sqrt(std::max(g.norm2[0], 0.0));
    double min_ratio = std::numeric_limits<double>::infinity();
    bool in_run = false;
    for (std::size_t i = 0; i + 1 < g.times.size(); ++i) {
      running = std::max(running, std::sqrt(std::max(g.norm2[i + 1], 0.0)));
      if (i == 0) continue;  // the segment leaving t0, where Y vanishes by construction
      // |Y_i + s D|^2 = a + 2 b s + c s^2 on s in [0, 1]
      const double a = g.norm2[i];
      const double b = g.cross[i] - g.norm2[i];
      const double c = g.norm2[i] + g.norm2[i + 1] - 2.0 * g.cross[i];
      double s = 0.0;
      if (c > 0.0) s = std::clamp(-b / c, 0.0, 1.0);
      else if (g.norm2[i + 1] < a) s = 1.0;
      const double m = std::sqrt(std::max(a + 2.0 * b * s + c * s * s, 0.0));
      const double ratio = running > 0.0 ? m / running : 0.0;
      min_ratio = std::min(min_ratio, ratio);
      if (ratio < threshold) {
        if (!in_run) out.candidates.push_back({d, g.times[i] + s * (g.times[i + 1] - g.times[i]), ratio});
        in_run = true;
      } else {
        in_run = false;
      }
    }
    out.min_ratio.push_back(std::isfinite(min_ratio) ? min_ratio : 1.0);
  }
  return out;
}

ConjugateScan conjugate_point_scan(const GeodesicRun& base, const std::vector<GridField>& directions,
                                   const JacobiOptions& options) {
  std::vector<GramSeries> series;
  if (base.snapshots.size() < 2) {
    series.resize(directions.size());
    return scan_conjugate(series);
  }
  JacobiOptions o = options;
  o.keep_fields = false;
  for (const auto& dir : directions) {
    if (dir.max_abs() == 0.0) throw InvalidInput("conjugate_point_scan: directions must be nonzero");
    series.push_back(integrate_jacobi(base, GridField(dir.grid(), 1), dir, std::nullopt, o).gram);
  }
  return scan_conjugate(series);
}

ConjugateScan conjugate_point_scan_2d(const FlowState& base, const std::vector<SpectralField>& directions, double dt,
                                      double t_end, const JacobiOptions& options) {
  JacobiOptions o = options;
  o.keep_fields = false;
  std::vector<GramSeries> series;
  for (const auto& dir : directions) {
    if (dir.max_abs_coefficient() == 0.0) throw InvalidInput("conjugate_point_scan: directions must be nonzero");
    if (t_end <= base.time) {
      series.emplace_back();
      continue;
    }
    series.push_back(
        integrate_jacobi_2d(base, SpectralField(dir.grid(), 2), dir, dt, t_end, 1, o).gram);
  }
  return scan_conjugate(series);
}

GramSeries sphere_jacobi_series(double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidInput("sphere_jacobi_series: need dt > 0 and t_end >= 0");
  using V3 = std::array<double, 3>;
  const auto spray = [](const V3& x, const V3& v) {
    const double s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return V3{-s * x[0], -s * x[1], -s * x[2]};
  };
  const auto base = [](double t) {
    return std::pair<V3, V3>{V3{std::cos(t), std::sin(t), 0.0}, V3{-std::sin(t), std::cos(t), 0.0}};
  };
  const auto jacobi = [&](double t, const V3& j, const V3& jd) {
    const double eps = 1e-6;
    const auto [x, v] = base(t);
    V3 xp, vp, xm, vm, acc;
    for (int k = 0; k < 3; ++k) {
      xp[k] = x[k] + eps * j[k];
      vp[k] = v[k] + eps * jd[k];
      xm[k] = x[k] - eps * j[k];
      vm[k] = v[k] - eps * jd[k];
    }
    const V3 sp = spray(xp, vp), sm = spray(xm, vm);
    for (int k = 0; k < 3; ++k) acc[k] = (sp[k] - sm[k]) / (2 * eps);
    return std::pair<V3, V3>{jd, acc};
  };
  const auto dot = [](const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  const auto ax = [](const V3& a, double h, const V3& b) { return V3{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]}; };

  GramSeries g;
  V3 j{0, 0, 0}, jd{0, 0, 1};
  double t = 0.0;
  g.times.push_back(t);
  g.norm2.push_back(0.0);
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double h = (n == steps ? t_end : n * dt) - t;
    const auto [a1, b1] = jacobi(t, j, jd);
    const auto [a2, b2] = jacobi(t + 0.5 * h, ax(j, 0.5 * h, a1), ax(jd, 0.5 * h, b1));
    const auto [a3, b3] = jacobi(t + 0.5 * h, ax(j, 0.5 * h, a2), ax(jd, 0.5 * h, b2));
    const auto [a4, b4] = jacobi(t + h, ax(j, h, a3), ax(jd, h, b3));
    V3 jn, jdn;
    for (int k = 0; k < 3; ++k) {
      jn[k] = j[k] + h / 6 * (a1[k] + 2 * a2[k] + 2 * a3[k] + a4[k]);
      jdn[k] = jd[k] + h / 6 * (b1[k] + 2 * b2[k] + 2 * b3[k] + b4[k]);
    }
    g.cross.push_back(dot(j, jn));
    j = jn;
    jd = jdn;
    t += h;
    g.times.push_back(t);
    g.norm2.push_back(dot(j, j));
  }
  return g;
}

DeviationStudy deviation_study(const DiffeoState& initial, const GridField& direction, double dt, double t_end,
                               const std::vector<double>& eps, const JacobiOptions& options) {
  if (eps.size() < 2) throw InvalidInput("deviation_study: need at least two eps values");
  const GeodesicOptions go{options.form, 1, true, kBreakdownThreshold};
  const GeodesicRun base = integrate_geodesic_1d(initial, dt, t_end, go);
  if (base.breakdown_time) throw BreakdownError("deviation_study: base geodesic broke down", base.breakdown_min_jacobian);
  JacobiOptions jo = options;
  jo.keep_fields = true;
  const JacobiTrajectory jac = integrate_jacobi(base, GridField(initial.grid(), 1), direction, std::nullopt, jo);

  DeviationStudy out;
  for (double e : eps) {
    DiffeoState pert = initial;
    pert.velocity += e * direction;
    const GeodesicRun run = integrate_geodesic_1d(pert, dt, t_end, go);
    if (run.breakdown_time || run.snapshots.size() != base.snapshots.size())
      throw BreakdownError("deviation_study: perturbed geodesic broke down", run.breakdown_min_jacobian);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.snapshots.size(); ++i) {
      GridField diff = run.snapshots[i].displacement - base.snapshots[i].displacement;
      diff *= 1.0 / e;
      diff -= jac.y[i];
      worst = std::max(worst, h1_norm_at(base.snapshots[i], diff));
    }
    out.eps.push_back(e);
    out.error.push_back(worst);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mx += std::log(out.eps[i]);
    my += std::log(out.error[i]);
  }
  mx /= eps.size();
  my /= eps.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sxy += (std::log(out.eps[i]) - mx) * (std::log(out.error[i]) - my);
    sxx += (std::log(out.eps[i]) - mx) * (std::log(out.eps[i]) - mx);
  }
  out.order = sxy / sxx;
  return out;
}

}  // namespace h1diff
