#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mmflow/space.hpp"

namespace mmflow {

enum class CalculusKind { kSlope, kQuadratic };

std::string_view to_string(CalculusKind kind);
CalculusKind parse_calculus_kind(std::string_view text);

/// |Df| per point. Slope: max over edge neighbours of |f(y)-f(x)|/d(x,y).
/// Quadratic: sqrt of sum_y w_xy (f(y)-f(x))^2 / (2 m(x)).
Field grad_modulus(const Space& space, CalculusKind kind, const Field& f);
Field grad_modulus_sq(const Space& space, CalculusKind kind, const Field& f);

/// Edge-neighbour slope; identical to grad_modulus(kSlope, g).
Field local_slope(const Space& space, const Field& g);

/// max over all pairs of |g(y)-g(x)|/d(x,y).
double global_lipschitz(const Space& space, const Field& g);

/// ||f||_mu^2 = sum |Df|^2 rho m for the given density.
double seminorm_sq(const Space& space, CalculusKind kind, const Field& f, const Field& density);
double seminorm(const Space& space, CalculusKind kind, const Field& f, const ProbMeasure& mu);

/// E(f) = 1/2 sum |Df|^2 m.
double cheeger_energy(const Space& space, CalculusKind kind, const Field& f);

struct Dpm {
  Field minus;
  Field plus;
};

/// One-sided derivatives of eps -> |D(g + eps f)|^2 / 2. Quadratic kind uses
/// the bilinear form; slope kind sweeps eps = +-2^-k, k = 0..max_k, and
/// returns the last grid value after checking monotonicity of the quotient.
Dpm dpm(const Space& space, CalculusKind kind, const Field& f, const Field& g, int max_k = 40);

/// (|D(g + eps f)|^2 - |Dg|^2) / (2 eps) per point, evaluated without
/// cancellation for small eps.
Field dpm_quotient(const Space& space, CalculusKind kind, const Field& f, const Field& g, double eps);

struct DualNorm {
  double norm = 0.0;
  std::optional<Field> phi;  // representing potential, quadratic kind only
  bool approximate = false;  // slope kind: certified lower bound
};

/// (1/2) N^2 = sup_f  l.f - (1/2) ||f||_mu^2.
/// Quadratic kind solves A_mu phi = l exactly on every component of the
/// edges carrying positive density; slope kind runs projected subgradient
/// ascent and reports the best ray value found.
DualNorm dual_norm(const Space& space, CalculusKind kind, const Field& ell, const Field& density,
                   int iterations = 500);

/// The mu-weighted Dirichlet matrix A_mu with f' A_mu f = ||f||_mu^2
/// (quadratic kind).
Eigen::MatrixXd dirichlet_matrix(const Space& space, const Field& density);

/// phi_n = min(n, phi) for n in levels.
std::vector<Field> truncations(const Field& phi, const std::vector<double>& levels);

struct StructureReport {
  double parallelogram = 0.0;  // max |.| deficit of the parallelogram rule in S^2
  double dpm_gap = 0.0;        // max D+ - D-
  double chain_affine = 0.0;   // truncations, points whose stencil sits in one piece
  double chain_excess = 0.0;   // max |D(phi o f)| - Lip(phi) |Df|, must be <= 0
  double chain_smooth = 0.0;   // smooth phi, logged only
  double leibniz_excess = 0.0; // max |D(fg)| - |f||Dg| - |g||Df|, logged only
  double convexity = 0.0;      // max excess of D+ over its convex combination bound
  double normpm = 0.0;         // max |D+-(f1-f2)(grad g)| - |D(f1-f2)||Dg|
  double signpm = 0.0;         // max |D+(-f)(grad g) + D-f(grad g)|
};

StructureReport structure_tests(const Space& space, CalculusKind kind,
                                const std::vector<Field>& sample_fns);

}  // namespace mmflow
