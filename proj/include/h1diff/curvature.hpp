#pragma once

// Curvature of the H^1 right-invariant metric at the identity of the flat
// torus. The H^1 connection is nabla^1_X Y = X.grad Y + A(X, Y) with
//
//   A(X, Z) = (1/2) H_a^{-1} [ a^2 nabla^* (K(X, Z)) ],  (nabla^* T)_n = -d_l T_ln,
//
// where (grad X)_li = d_i X^l and the kernel K is, per variant,
//   TwoTerm: gX gZ + gZ gX
//   SixTerm: gX gZ + gZ gX + gX gZ^T + gZ gX^T - gX^T gZ - gZ^T gX
// Kernel is the unsymmetrised single term a^2 H_a^{-1} d_l (d_i X^l d_n Z^i)
// used by the coordinate expansion; it is not a connection form on its own.

#include <optional>
#include <string>

#include "h1diff/spectral_field.hpp"
#include "h1diff/trig_spec.hpp"

namespace h1diff {

enum class AVariant { TwoTerm, SixTerm, Kernel };

/// How the nested A(X, A(Y, Z)) terms are counted when R^1 is assembled from
/// A(X, nabla^1_Y Z) + ... + A(X, A(Y, Z)) - ...
///   Literal: nabla^1 inside the first term also carries A, so the nested term
///            appears twice.
///   SingleCount: the first term uses the flat derivative only.
enum class R1Assembly { Literal, SingleCount };

struct CurvatureOptions {
  AVariant variant = AVariant::TwoTerm;
  R1Assembly assembly = R1Assembly::Literal;
  double alpha = 1.0;
};

const char* to_string(AVariant v);
const char* to_string(R1Assembly a);
/// Accepts "two_term", "six_term", "kernel". Throws InvalidInput otherwise.
AVariant parse_variant(const std::string& s);
R1Assembly parse_assembly(const std::string& s);

SpectralField a_form(const SpectralField& x, const SpectralField& z, AVariant variant = AVariant::TwoTerm,
                     double alpha = 1.0);

/// Flat covariant derivative X.grad W.
SpectralField directional(const SpectralField& x, const SpectralField& w);

/// [X, Y] = X.grad Y - Y.grad X.
SpectralField lie_bracket(const SpectralField& x, const SpectralField& y);

/// The seven building blocks of R^1(X, Y)Z.
struct R1Terms {
  SpectralField transport_x;  // X.grad A(Y, Z)
  SpectralField transport_y;  // Y.grad A(X, Z)
  SpectralField inner_x;      // A(X, Y.grad Z)
  SpectralField inner_y;      // A(Y, X.grad Z)
  SpectralField nested_x;     // A(X, A(Y, Z))
  SpectralField nested_y;     // A(Y, A(X, Z))
  SpectralField bracket;      // A([X, Y], Z)
};

R1Terms r1_terms(const SpectralField& x, const SpectralField& y, const SpectralField& z,
                 AVariant variant = AVariant::TwoTerm, double alpha = 1.0);

/// Combines terms: tx - ty + ix - iy + m (nx - ny) - b with m = 2 (Literal) or 1.
SpectralField assemble(const R1Terms& t, R1Assembly assembly);

SpectralField r1_operator(const SpectralField& x, const SpectralField& y, const SpectralField& z,
                          const CurvatureOptions& options = {});

/// Index-by-index expansion with the single kernel (Kernel variant), written
/// directly from component derivatives. Terms line up with r1_terms(..., Kernel).
R1Terms r1_coordinate_terms(const SpectralField& x, const SpectralField& y, const SpectralField& z,
                            double alpha = 1.0);

/// Sum of the coordinate terms with single counting (dim 2 only).
SpectralField r1_coordinate(const SpectralField& x, const SpectralField& y, const SpectralField& z,
                            double alpha = 1.0);

/// S(X, Y) = Q(X.grad Y + A(X, Y)). Throws InvalidInput for compressible input.
SpectralField second_fundamental(const SpectralField& x, const SpectralField& y, AVariant variant = AVariant::TwoTerm,
                                 double alpha = 1.0);

enum class SignClass { Negative, Zero, Positive };
const char* to_string(SignClass s);

struct CurvatureReport {
  TrigFieldSpec x_spec{2, 2};
  TrigFieldSpec y_spec{2, 2};
  double numerator = 0.0;         // <R(X,Y)Y, X>_1, including the Gauss correction on the subgroup
  double gauss_correction = 0.0;  // <S(Y,Y),S(X,X)>_1 - <S(X,Y),S(Y,X)>_1, zero for the full group
  double gram = 0.0;              // ||X||^2 ||Y||^2 - <X,Y>^2
  std::optional<double> sectional;
  SignClass sign = SignClass::Zero;
  CurvatureOptions options;
  int n = 0;
  bool subgroup = false;
};

/// Sign tolerance relative to ||X||_1^2 ||Y||_1^2.
inline constexpr double kSignTolerance = 1e-9;
/// Gram below which the normalised value is left undefined.
inline constexpr double kGramFloor = 1e-12;

/// Full-group sectional numerator for two trigonometric directions.
CurvatureReport sectional(const TrigFieldSpec& x, const TrigFieldSpec& y, const Grid& grid,
                          const CurvatureOptions& options = {});

/// Volume-preserving subgroup via the Gauss formula. Specs must be divergence-free.
CurvatureReport sectional_dmu(const TrigFieldSpec& x, const TrigFieldSpec& y, const Grid& grid,
                              const CurvatureOptions& options = {});

}  // namespace h1diff
