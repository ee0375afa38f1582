#include "h1diff/curvature.hpp"

#include <cmath>
#include <vector>

#include "h1diff/errors.hpp"

namespace h1diff {
namespace {

using Matrix = std::vector<std::vector<GridField>>;

void require_vector(const SpectralField& f, const char* what) {
  if (f.components() != f.grid().dim())
    throw InvalidInput(std::string(what) + ": expected a vector field with one component per axis");
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw InvalidInput("fields live on different grids");
}

GridField slice(const GridField& f, int c) {
  const auto src = f.component(c);
  return GridField(f.grid(), {std::vector<double>(src.begin(), src.end())});
}

GridField join(const Grid& grid, const std::vector<GridField>& parts) {
  std::vector<std::vector<double>> data;
  for (const auto& p : parts) data.emplace_back(p.component(0).begin(), p.component(0).end());
  return GridField(grid, std::move(data));
}

// J[l][i] = d_i X^l in physical space.
Matrix jacobian(const SpectralField& x) {
  const int d = x.grid().dim();
  Matrix j(d);
  for (int l = 0; l < d; ++l) {
    const auto xl = component(x, l);
    for (int i = 0; i < d; ++i) j[l].push_back(to_physical(derivative(xl, i)));
  }
  return j;
}

// m += s * op(p) op(q), op = transpose when flagged.
void accumulate(Matrix& m, const Matrix& p, bool tp, const Matrix& q, bool tq, double s) {
  const int d = static_cast<int>(m.size());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const GridField& pa = tp ? p[c][a] : p[a][c];
        const GridField& qb = tq ? q[b][c] : q[c][b];
        m[a][b] += s * multiply(pa, qb);
      }
}

// (div M)_n = sum_l d_l M_ln
SpectralField matrix_divergence(const Grid& grid, const Matrix& m) {
  const int d = grid.dim();
  std::vector<SpectralField> out;
  for (int n = 0; n < d; ++n) {
    SpectralField acc(grid, 1);
    for (int l = 0; l < d; ++l) acc += derivative(to_spectral(m[l][n]), l);
    out.push_back(std::move(acc));
  }
  return stack(out);
}

}  // namespace

const char* to_string(AVariant v) {
  switch (v) {
    case AVariant::TwoTerm: return "two_term";
    case AVariant::SixTerm: return "six_term";
    case AVariant::Kernel: return "kernel";
  }
  return "?";
}

const char* to_string(R1Assembly a) { return a == R1Assembly::Literal ? "literal" : "single"; }

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::Negative: return "negative";
    case SignClass::Zero: return "zero";
    case SignClass::Positive: return "positive";
  }
  return "?";
}

AVariant parse_variant(const std::string& s) {
  if (s == "two_term") return AVariant::TwoTerm;
  if (s == "six_term") return AVariant::SixTerm;
  if (s == "kernel") return AVariant::Kernel;
  throw InvalidInput("unknown A variant '" + s + "' (expected two_term, six_term or kernel)");
}

R1Assembly parse_assembly(const std::string& s) {
  if (s == "literal") return R1Assembly::Literal;
  if (s == "single") return R1Assembly::SingleCount;
  throw InvalidInput("unknown R1 assembly '" + s + "' (expected literal or single)");
}

SpectralField a_form(const SpectralField& x, const SpectralField& z, AVariant variant, double alpha) {
  require_vector(x, "a_form");
  require_vector(z, "a_form");
  require_same_grid(x, z);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("a_form: alpha must be finite and >= 0");
  const Grid& g = x.grid();
  const int d = g.dim();
  if (alpha == 0.0) return SpectralField(g, d);

  const Matrix jx = jacobian(x), jz = jacobian(z);
  Matrix m(d, std::vector<GridField>(d, GridField(g, 1)));
  double factor = -0.5;
  switch (variant) {
    case AVariant::TwoTerm:
      accumulate(m, jx, false, jz, false, 1.0);
      accumulate(m, jz, false, jx, false, 1.0);
      break;
    case AVariant::SixTerm:
      accumulate(m, jx, false, jz, false, 1.0);
      accumulate(m, jz, false, jx, false, 1.0);
      accumulate(m, jx, false, jz, true, 1.0);
      accumulate(m, jz, false, jx, true, 1.0);
      accumulate(m, jx, true, jz, false, -1.0);
      accumulate(m, jz, true, jx, false, -1.0);
      break;
    case AVariant::Kernel:
      accumulate(m, jx, false, jz, false, 1.0);
      factor = 1.0;
      break;
  }
  return (factor * alpha * alpha) * helmholtz_inverse(matrix_divergence(g, m), alpha);
}

SpectralField directional(const SpectralField& x, const SpectralField& w) {
  require_vector(x, "directional");
  require_same_grid(x, w);
  const Grid& g = x.grid();
  const int d = g.dim();
  const GridField xs = to_physical(x);
  std::vector<GridField> out;
  for (int n = 0; n < w.components(); ++n) {
    const auto wn = component(w, n);
    GridField acc(g, 1);
    for (int j = 0; j < d; ++j) acc += multiply(slice(xs, j), to_physical(derivative(wn, j)));
    out.push_back(std::move(acc));
  }
  return to_spectral(join(g, out));
}

SpectralField lie_bracket(const SpectralField& x, const SpectralField& y) {
  return directional(x, y) - directional(y, x);
}

R1Terms r1_terms(const SpectralField& x, const SpectralField& y, const SpectralField& z, AVariant variant,
                 double alpha) {
  require_same_grid(x, y);
  require_same_grid(x, z);
  const auto a = [&](const SpectralField& p, const SpectralField& q) { return a_form(p, q, variant, alpha); };
  const SpectralField ayz = a(y, z), axz = a(x, z);
  return R1Terms{directional(x, ayz),
                 directional(y, axz),
                 a(x, directional(y, z)),
                 a(y, directional(x, z)),
                 a(x, ayz),
                 a(y, axz),
                 a(directional(x, y), z) - a(directional(y, x), z)};
}

SpectralField assemble(const R1Terms& t, R1Assembly assembly) {
  const double m = assembly == R1Assembly::Literal ? 2.0 : 1.0;
  return t.transport_x - t.transport_y + t.inner_x - t.inner_y + m * (t.nested_x - t.nested_y) - t.bracket;
}

SpectralField r1_operator(const SpectralField& x, const SpectralField& y, const SpectralField& z,
                          const CurvatureOptions& options) {
  require_same_grid(x, y);
  require_same_grid(x, z);
  const auto a = [&](const SpectralField& p, const SpectralField& q) {
    return a_form(p, q, options.variant, options.alpha);
  };
  const double m = options.assembly == R1Assembly::Literal ? 2.0 : 1.0;
  // half(P, Q) collects every term of R(P,Q)Z that carries P outermost, so
  // R(X,Y)Z = half(X,Y) - half(Y,X) is antisymmetric bit for bit.
  const auto half = [&](const SpectralField& p, const SpectralField& q) {
    const SpectralField aqz = a(q, z);
    return directional(p, aqz) + a(p, directional(q, z)) + m * a(p, aqz) - a(directional(p, q), z);
  };
  return half(x, y) - half(y, x);
}

R1Terms r1_coordinate_terms(const SpectralField& x, const SpectralField& y, const SpectralField& z, double alpha) {
  require_vector(x, "r1_coordinate");
  require_vector(y, "r1_coordinate");
  require_vector(z, "r1_coordinate");
  require_same_grid(x, y);
  require_same_grid(x, z);
  const Grid& g = x.grid();
  if (g.dim() != 2) throw InvalidInput("r1_coordinate: needs a 2D grid");
  const int d = 2;
  using Phys = std::vector<double>;
  using Vec = std::vector<Phys>;
  const auto n_pts = static_cast<std::size_t>(g.size());

  const auto to_s = [&](const Phys& f) { return to_spectral(GridField(g, {f})); };
  const auto to_p = [&](const SpectralField& f) {
    const GridField p = to_physical(f);
    return Phys(p.component(0).begin(), p.component(0).end());
  };
  const auto diff = [&](const Phys& f, int axis) { return to_p(derivative(to_s(f), axis)); };
  const auto hinv = [&](const Phys& f) {
    Phys out = to_p(helmholtz_inverse(to_s(f), alpha));
    for (auto& v : out) v *= alpha * alpha;
    return out;
  };
  const auto phys = [&](const SpectralField& f) {
    const GridField p = to_physical(f);
    Vec out;
    for (int c = 0; c < d; ++c) out.emplace_back(p.component(c).begin(), p.component(c).end());
    return out;
  };
  const auto fma_into = [&](Phys& acc, const Phys& a, const Phys& b, double s) {
    for (std::size_t p = 0; p < n_pts; ++p) acc[p] += s * a[p] * b[p];
  };
  const auto grad = [&](const Vec& v) {
    std::vector<Vec> j(d, Vec(d));
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i) j[l][i] = diff(v[l], i);
    return j;
  };
  // kbar(P, W)^n = a^2 H^{-1} d_l ( d_i P^l  d_n W^i )
  const auto kbar = [&](const Vec& p, const Vec& w) {
    const auto gp = grad(p), gw = grad(w);
    Vec out(d);
    for (int n = 0; n < d; ++n) {
      Phys div(n_pts, 0.0);
      for (int l = 0; l < d; ++l) {
        Phys inner(n_pts, 0.0);
        for (int i = 0; i < d; ++i) fma_into(inner, gp[l][i], gw[i][n], 1.0);
        const Phys dl = diff(inner, l);
        for (std::size_t q = 0; q < n_pts; ++q) div[q] += dl[q];
      }
      out[n] = hinv(div);
    }
    return out;
  };
  // (P.grad W)^n = P^j d_j W^n
  const auto transport = [&](const Vec& p, const Vec& w) {
    Vec out(d, Phys(n_pts, 0.0));
    for (int n = 0; n < d; ++n)
      for (int j = 0; j < d; ++j) fma_into(out[n], p[j], diff(w[n], j), 1.0);
    return out;
  };
  const auto finish = [&](const Vec& v) {
    std::vector<SpectralField> parts;
    for (const auto& c : v) parts.push_back(to_s(c));
    return stack(parts);
  };

  const Vec X = phys(x), Y = phys(y), Z = phys(z);
  const Vec k_yz = kbar(Y, Z), k_xz = kbar(X, Z);
  Vec xy = transport(X, Y), yx = transport(Y, X);
  Vec br(d);
  for (int c = 0; c < d; ++c) {
    br[c] = xy[c];
    for (std::size_t q = 0; q < n_pts; ++q) br[c][q] -= yx[c][q];
  }
  return R1Terms{finish(transport(X, k_yz)),
                 finish(transport(Y, k_xz)),
                 finish(kbar(X, transport(Y, Z))),
                 finish(kbar(Y, transport(X, Z))),
                 finish(kbar(X, k_yz)),
                 finish(kbar(Y, k_xz)),
                 finish(kbar(br, Z))};
}

SpectralField r1_coordinate(const SpectralField& x, const SpectralField& y, const SpectralField& z, double alpha) {
  return assemble(r1_coordinate_terms(x, y, z, alpha), R1Assembly::SingleCount);
}

SpectralField second_fundamental(const SpectralField& x, const SpectralField& y, AVariant variant, double alpha) {
  require_vector(x, "second_fundamental");
  require_vector(y, "second_fundamental");
  if (!x.is_divergence_free() || !y.is_divergence_free())
    throw InvalidInput("second_fundamental: both arguments must be divergence-free");
  return gradient_part(directional(x, y) + a_form(x, y, variant, alpha));
}

namespace {

CurvatureReport base_report(const TrigFieldSpec& xs, const TrigFieldSpec& ys, const Grid& grid,
                            const CurvatureOptions& options, const SpectralField& x, const SpectralField& y) {
  CurvatureReport r;
  r.x_spec = xs;
  r.y_spec = ys;
  r.options = options;
  r.n = grid.n();
  r.numerator = h1_inner(r1_operator(x, y, y, options), x, options.alpha);
  return r;
}

void classify(CurvatureReport& r, const SpectralField& x, const SpectralField& y, double alpha) {
  const double xx = h1_inner(x, x, alpha), yy = h1_inner(y, y, alpha), xy = h1_inner(x, y, alpha);
  r.gram = std::max(0.0, xx * yy - xy * xy);
  if (r.gram > kGramFloor) r.sectional = r.numerator / r.gram;
  const double tol = kSignTolerance * xx * yy;
  r.sign = r.numerator < -tol ? SignClass::Negative : (r.numerator > tol ? SignClass::Positive : SignClass::Zero);
}

std::pair<SpectralField, SpectralField> directions(const TrigFieldSpec& xs, const TrigFieldSpec& ys,
                                                   const Grid& grid) {
  if (xs.dim() != grid.dim() || ys.dim() != grid.dim() || xs.components() != grid.dim() ||
      ys.components() != grid.dim())
    throw InvalidInput("sectional: specs must be vector fields matching the grid dimension");
  SpectralField x = xs.to_field(grid), y = ys.to_field(grid);
  if (x.max_abs_coefficient() == 0.0 || y.max_abs_coefficient() == 0.0)
    throw InvalidInput("sectional: directions must be nonzero");
  return {std::move(x), std::move(y)};
}

}  // namespace

CurvatureReport sectional(const TrigFieldSpec& xs, const TrigFieldSpec& ys, const Grid& grid,
                          const CurvatureOptions& options) {
  const auto [x, y] = directions(xs, ys, grid);
  CurvatureReport r = base_report(xs, ys, grid, options, x, y);
  classify(r, x, y, options.alpha);
  return r;
}

CurvatureReport sectional_dmu(const TrigFieldSpec& xs, const TrigFieldSpec& ys, const Grid& grid,
                              const CurvatureOptions& options) {
  if (!xs.is_divergence_free() || !ys.is_divergence_free())
    throw InvalidInput("sectional_dmu: directions must be divergence-free");
  const auto [x, y] = directions(xs, ys, grid);
  CurvatureReport r = base_report(xs, ys, grid, options, x, y);
  const auto s = [&](const SpectralField& p, const SpectralField& q) {
    return second_fundamental(p, q, options.variant, options.alpha);
  };
  r.gauss_correction =
      h1_inner(s(y, y), s(x, x), options.alpha) - h1_inner(s(x, y), s(y, x), options.alpha);
  r.numerator += r.gauss_correction;
  r.subgroup = true;
  classify(r, x, y, options.alpha);
  return r;
}

}  // namespace h1diff
