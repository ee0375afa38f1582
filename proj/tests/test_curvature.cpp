#include <cmath>
#include <random>

#include "doctest.h"
#include "h1diff/curvature.hpp"
#include "h1diff/errors.hpp"
#include "h1diff/euler_alpha.hpp"
#include "oracles.hpp"

using namespace h1diff;
using oracle::pi;

namespace {

SpectralField field(const Grid& g, auto fn) { return to_spectral(sample(g, 2, fn)); }

TrigFieldSpec spec(const std::string& text) { return TrigFieldSpec::parse(text, 2, 2); }

std::string mode(int c, const char* phase, int k1, int k2, double amp = 1.0) {
  return std::to_string(c) + ": " + std::to_string(amp) + "*" + phase + "(" + std::to_string(k1) + "," +
         std::to_string(k2) + ")";
}

// a * sin/cos(<k,x>) with amplitude vector a perpendicular to k
SpectralField single_exponential(const Grid& g, std::array<int, 2> k, double amp, bool cosine) {
  const double a0 = -k[1] * amp, a1 = k[0] * amp;
  return field(g, [=](int c, auto x) {
    const double ph = k[0] * x[0] + k[1] * x[1];
    return (c == 0 ? a0 : a1) * (cosine ? std::cos(ph) : std::sin(ph));
  });
}

}  // namespace

TEST_CASE("a_form vanishes on zero and constant arguments") {
  const Grid g(2, 32);
  const auto z = random_band_limited(g, 2, 1, 3);
  const auto c = field(g, [](int k, auto) { return k == 0 ? 0.4 : -1.1; });
  for (auto v : {AVariant::TwoTerm, AVariant::SixTerm, AVariant::Kernel}) {
    CHECK(a_form(SpectralField(g, 2), z, v).max_abs_coefficient() == 0.0);
    CHECK(a_form(c, z, v).max_abs_coefficient() < 1e-15);
  }
  CHECK(a_form(z, z, AVariant::TwoTerm, 0.0).max_abs_coefficient() == 0.0);
}

TEST_CASE("a_form of sin x1 with itself") {
  // grad X grad X = diag(cos^2 x1, 0); -(1/2) d_1 (2 cos^2 x1) = sin 2x1; H^{-1} at k=2 divides by 5
  const Grid g(2, 32);
  const auto x = field(g, [](int c, auto p) { return c == 0 ? std::sin(p[0]) : 0.0; });
  for (auto v : {AVariant::TwoTerm, AVariant::SixTerm}) {
    CHECK(oracle::max_error(to_physical(a_form(x, x, v)),
                            [](int c, auto p) { return c == 0 ? 0.2 * std::sin(2 * p[0]) : 0.0; }) < 1e-15);
  }
  // alpha scaling: (1/2) a^2 (1 + 4 a^2)^{-1} * 2 sin 2x1
  const double a = 0.5;
  CHECK(oracle::max_error(to_physical(a_form(x, x, AVariant::TwoTerm, a)), [=](int c, auto p) {
          return c == 0 ? a * a / (1 + 4 * a * a) * std::sin(2 * p[0]) : 0.0;
        }) < 1e-15);
}

TEST_CASE("a_form is symmetric and bilinear") {
  const Grid g(2, 32);
  const auto x = random_band_limited(g, 2, 11, 3), z = random_band_limited(g, 2, 12, 3),
             w = random_band_limited(g, 2, 13, 3);
  for (auto v : {AVariant::TwoTerm, AVariant::SixTerm}) {
    CHECK(oracle::rel_diff(a_form(x, z, v), a_form(z, x, v)) < 1e-12);
    CHECK(oracle::rel_diff(a_form(2.0 * x - 0.5 * w, z, v), 2.0 * a_form(x, z, v) - 0.5 * a_form(w, z, v)) < 1e-12);
  }
  // the single kernel is not symmetric
  CHECK(oracle::rel_diff(a_form(x, z, AVariant::Kernel), a_form(z, x, AVariant::Kernel)) > 1e-3);
}

TEST_CASE("the two A variants differ off shear data") {
  const Grid g(2, 32);
  const auto x = random_divergence_free(g, 21, 3), z = random_divergence_free(g, 22, 3);
  CHECK(oracle::rel_diff(a_form(x, z, AVariant::TwoTerm), a_form(x, z, AVariant::SixTerm)) > 1e-3);
}

TEST_CASE("lie bracket and directional derivative") {
  const Grid g(2, 32);
  const auto x = field(g, [](int c, auto p) { return c == 0 ? 1.0 : 0.0; });
  const auto y = field(g, [](int c, auto p) { return c == 0 ? std::sin(p[0]) : std::cos(p[1]); });
  CHECK(oracle::max_error(to_physical(directional(x, y)),
                          [](int c, auto p) { return c == 0 ? std::cos(p[0]) : 0.0; }) < 1e-14);
  CHECK(oracle::rel_diff(lie_bracket(x, y), -lie_bracket(y, x)) == 0.0);
}

TEST_CASE("R1 is antisymmetric bit for bit and vanishes for X = Y") {
  const Grid g(2, 32);
  const auto x = random_band_limited(g, 2, 1, 2), y = random_band_limited(g, 2, 2, 2),
             z = random_band_limited(g, 2, 3, 2);
  for (auto v : {AVariant::TwoTerm, AVariant::SixTerm}) {
    for (auto as : {R1Assembly::Literal, R1Assembly::SingleCount}) {
      const CurvatureOptions o{v, as, 1.0};
      const auto sum = r1_operator(x, y, z, o) + r1_operator(y, x, z, o);
      CHECK(sum.max_abs_coefficient() == 0.0);
      CHECK(r1_operator(x, x, z, o).max_abs_coefficient() == 0.0);
    }
  }
}

TEST_CASE("R1 is trilinear") {
  const Grid g(2, 32);
  const auto x1 = random_band_limited(g, 2, 4, 2), x2 = random_band_limited(g, 2, 5, 2),
             y = random_band_limited(g, 2, 6, 2), z = random_band_limited(g, 2, 7, 2);
  const double a = 1.7, b = -0.3;
  const auto r = [](auto p, auto q, auto s) { return r1_operator(p, q, s); };
  CHECK(oracle::rel_diff(r(a * x1 + b * x2, y, z), a * r(x1, y, z) + b * r(x2, y, z)) < 1e-11);
  CHECK(oracle::rel_diff(r(y, a * x1 + b * x2, z), a * r(y, x1, z) + b * r(y, x2, z)) < 1e-11);
  CHECK(oracle::rel_diff(r(y, z, a * x1 + b * x2), a * r(y, z, x1) + b * r(y, z, x2)) < 1e-11);
}

TEST_CASE("R1 vanishes on divergence-free single-exponential triples") {
  const Grid g(2, 64);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> kd(-5, 5);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<int, 2> k{0, 0};
    while (k[0] == 0 && k[1] == 0) k = {kd(rng), kd(rng)};
    const auto x = single_exponential(g, k, ad(rng), trial % 2 == 0);
    const auto y = single_exponential(g, k, ad(rng), true) + single_exponential(g, k, ad(rng), false);
    const auto z = single_exponential(g, k, ad(rng), trial % 3 == 0);
    const double scale = h1_norm(x, 1.0) * h1_norm(y, 1.0) * h1_norm(z, 1.0);
    CAPTURE(k[0]);
    CAPTURE(k[1]);
    CHECK(h1_norm(r1_operator(x, y, z), 1.0) <= 1e-10 * scale);
    CHECK(h1_norm(r1_operator(x, y, z, {AVariant::TwoTerm, R1Assembly::SingleCount}), 1.0) <= 1e-10 * scale);
    CHECK(h1_norm(r1_coordinate(x, y, z), 1.0) <= 1e-10 * scale);
  }
}

TEST_CASE("single-exponential triples: cases that do not vanish") {
  const Grid g(2, 32);
  // the six-term kernel leaves a residue even for divergence-free amplitudes
  const auto e = single_exponential(g, {1, 2}, 1.0, false), f = single_exponential(g, {1, 2}, 1.0, true);
  CHECK(h1_norm(r1_operator(e, f, e, {AVariant::SixTerm}), 1.0) >
        1e-3 * h1_norm(e, 1.0) * h1_norm(f, 1.0) * h1_norm(e, 1.0));
  // compressible amplitudes
  const auto x = field(g, [](int c, auto p) { return c == 0 ? std::sin(p[0]) : 0.0; });
  const auto y = field(g, [](int c, auto p) { return c == 0 ? std::cos(p[0]) : 0.0; });
  CHECK(h1_norm(r1_operator(x, y, y), 1.0) > 1.0);
}

TEST_CASE("coordinate expansion matches the operator assembly term by term") {
  const Grid g(2, 32);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto x = random_band_limited(g, 2, 10 * seed, 2), y = random_band_limited(g, 2, 10 * seed + 1, 2),
               z = random_band_limited(g, 2, 10 * seed + 2, 2);
    const auto op = r1_terms(x, y, z, AVariant::Kernel);
    const auto co = r1_coordinate_terms(x, y, z);
    CHECK(oracle::rel_diff(co.transport_x, op.transport_x) < 1e-10);
    CHECK(oracle::rel_diff(co.transport_y, op.transport_y) < 1e-10);
    CHECK(oracle::rel_diff(co.inner_x, op.inner_x) < 1e-10);
    CHECK(oracle::rel_diff(co.inner_y, op.inner_y) < 1e-10);
    CHECK(oracle::rel_diff(co.nested_x, op.nested_x) < 1e-10);
    CHECK(oracle::rel_diff(co.nested_y, op.nested_y) < 1e-10);
    CHECK(oracle::rel_diff(co.bracket, op.bracket) < 1e-10);
    const auto r = r1_operator(x, y, z, {AVariant::Kernel, R1Assembly::SingleCount});
    CHECK(oracle::rel_diff(r1_coordinate(x, y, z), r) < 1e-10);
  }
}

TEST_CASE("coordinate expansion on constants and the parallel pair") {
  const Grid g(2, 32);
  const auto c = field(g, [](int k, auto) { return k == 0 ? 0.3 : 2.0; });
  CHECK(r1_coordinate(c, c, c).max_abs_coefficient() < 1e-15);
  CHECK_THROWS_AS(r1_coordinate(SpectralField(Grid(1, 16), 1), SpectralField(Grid(1, 16), 1),
                                SpectralField(Grid(1, 16), 1)),
                  InvalidInput);
  for (int k = 1; k <= 3; ++k) {
    const auto x = field(g, [k](int i, auto p) { return i == 0 ? std::sin(k * p[0]) : 0.0; });
    const auto y = field(g, [k](int i, auto p) { return i == 0 ? std::cos(k * p[0]) : 0.0; });
    CHECK(h1_inner(r1_coordinate(x, y, y), x, 1.0) < 0.0);
  }
}

TEST_CASE("sign table at N = 32 and 64") {
  for (int k = 1; k <= 3; ++k) {
    const auto x = spec(mode(0, "sin", k, 0));
    const auto y_perp = spec(mode(1, "cos", 0, k));
    const auto y_par = spec(mode(0, "cos", k, 0));
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
      const Grid g(2, n);
      CHECK(sectional(x, y_perp, g).sign == SignClass::Zero);
      const auto r = sectional(x, y_par, g);
      CHECK(r.sign == SignClass::Negative);
      CHECK(r.sectional.has_value());
      if (n > 32) CHECK(std::abs(r.numerator - prev) <= 1e-8 * std::abs(prev));
      prev = r.numerator;
    }
  }
}

TEST_CASE("sign table holds for every variant and assembly") {
  const Grid g(2, 32);
  for (auto v : {AVariant::TwoTerm, AVariant::SixTerm}) {
    for (auto as : {R1Assembly::Literal, R1Assembly::SingleCount}) {
      for (int k = 1; k <= 3; ++k) {
        const CurvatureOptions o{v, as, 1.0};
        CHECK(sectional(spec(mode(0, "sin", k, 0)), spec(mode(1, "cos", 0, k)), g, o).sign == SignClass::Zero);
        CHECK(sectional(spec(mode(0, "sin", k, 0)), spec(mode(0, "cos", k, 0)), g, o).sign ==
              SignClass::Negative);
      }
    }
  }
}

TEST_CASE("parallel-pair numerators agree with an independent dense evaluation") {
  // reference values from a separate NumPy evaluation on a 64^2 grid
  const Grid g(2, 64);
  const double expected[3] = {-19.739209, -427.295814, -2290.281713};
  for (int k = 1; k <= 3; ++k) {
    const auto r = sectional(spec(mode(0, "sin", k, 0)), spec(mode(0, "cos", k, 0)), g);
    CHECK(r.numerator == doctest::Approx(expected[k - 1]).epsilon(1e-7));
  }
  CHECK(sectional(spec(mode(0, "sin", 1, 0)), spec(mode(0, "cos", 1, 0)), g).numerator ==
        doctest::Approx(-2 * pi * pi).epsilon(1e-12));
}

TEST_CASE("sectional reports undefined normalisation for parallel directions") {
  const Grid g(2, 32);
  const auto r = sectional(spec(mode(0, "sin", 1, 0)), spec(mode(0, "sin", 1, 0, 2.0)), g);
  CHECK(r.gram < kGramFloor);
  CHECK_FALSE(r.sectional.has_value());
  CHECK(r.sign == SignClass::Zero);
  CHECK_THROWS_AS(sectional(TrigFieldSpec(2, 2), spec(mode(0, "sin", 1, 0)), g), InvalidInput);
}

TEST_CASE("second fundamental form") {
  const Grid g(2, 32);
  const auto c = field(g, [](int k, auto) { return k == 0 ? 0.0 : 1.3; });
  CHECK(second_fundamental(c, c).max_abs_coefficient() < 1e-15);
  const auto shear = field(g, [](int k, auto p) { return k == 0 ? std::sin(p[1]) : 0.0; });
  CHECK(second_fundamental(shear, shear).max_abs_coefficient() < 1e-15);

  const auto tg = taylor_green(g);
  const auto s = second_fundamental(tg, tg);
  CHECK(oracle::rel_diff(s, gradient_part(directional(tg, tg) + a_form(tg, tg))) < 1e-10);
  CHECK(leray_project(s).max_abs_coefficient() < 1e-14);
  CHECK(s.max_abs_coefficient() > 0.1);

  const auto u = random_divergence_free(g, 31, 3), w = random_divergence_free(g, 32, 3);
  CHECK(oracle::rel_diff(second_fundamental(u, w), second_fundamental(w, u)) < 1e-10);

  const auto bad = field(g, [](int k, auto p) { return k == 0 ? std::sin(p[0]) : 0.0; });
  CHECK_THROWS_AS(second_fundamental(bad, tg), InvalidInput);
}

TEST_CASE("subgroup curvature via the Gauss formula") {
  const Grid g(2, 32);
  // mixed directions with k along x2 and m along x1 are divergence-free
  const auto x = spec(mode(0, "sin", 0, 1) + "; " + mode(1, "cos", 1, 0));
  const auto y = spec(mode(0, "cos", 0, 1) + "; " + mode(1, "sin", 1, 0));
  const auto full = sectional(x, y, g), sub = sectional_dmu(x, y, g);
  CHECK(sub.subgroup);
  CHECK(full.sign == SignClass::Negative);
  CHECK(sub.sign == SignClass::Negative);

  // pressure-constant direction: S(U,U) = 0, so the subgroup value is the full value minus ||S(U,X)||^2
  const auto shear = spec(mode(0, "sin", 0, 1));
  for (const auto& d : {spec(mode(1, "cos", 1, 0)), spec(mode(0, "cos", 0, 1)),
                        spec(mode(0, "sin", 1, 1) + "; " + mode(1, "sin", 1, 1, -1.0))}) {
    const auto f = sectional(d, shear, g), s = sectional_dmu(d, shear, g);
    const auto sx = second_fundamental(shear.to_field(g), d.to_field(g));
    CHECK(s.numerator == doctest::Approx(f.numerator - h1_inner(sx, sx, 1.0)).epsilon(1e-12));
    CHECK(s.numerator <= f.numerator + 1e-12);
  }
  const auto cst = spec("1: 1*cos(0,0)");
  const auto xs = spec(mode(1, "cos", 1, 0));
  CHECK(sectional_dmu(xs, cst, g).numerator <= sectional(xs, cst, g).numerator + 1e-12);

  // orthogonal shears with every S vanishing: no correction
  const auto a = spec(mode(0, "sin", 0, 1)), b = spec(mode(0, "cos", 0, 2));
  const auto fa = sectional(a, b, g), sa = sectional_dmu(a, b, g);
  CHECK(sa.gauss_correction == 0.0);
  CHECK(sa.numerator == fa.numerator);

  CHECK_THROWS_AS(sectional_dmu(spec(mode(0, "sin", 1, 0)), y, g), InvalidInput);
}
