#pragma once

#include <vector>

#include "mmflow/calculus.hpp"
#include "mmflow/config.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/paths.hpp"
#include "mmflow/report.hpp"

namespace mmflow {

struct GeodesicBundle {
  CurveSample curve;
  Field phi0;                     // Kantorovich potential from mu_0 to mu_1
  std::vector<Field> potentials;  // phi_t = -Q_{1-t}(-phi0^c) at each curve time
  Plan lifting;
  double w2 = 0.0;                // W2(mu_0, mu_1)
};

/// Displacement interpolation on path_grid_1d / grid_2d spaces. Every atom
/// (x, y) of the optimal coupling travels along (1-t) x + t y in grid index
/// coordinates; its mass is split linearly between the two nearest grid
/// points on each axis (product of the splits in 2D). The lifting chains the
/// monotone per-axis couplings of each atom. Throws UnsupportedSpace off grids.
GeodesicBundle displacement_interpolation(const Space& space, const ProbMeasure& mu0, const ProbMeasure& mu1,
                                          const std::vector<double>& times);

/// phi_t = -Q_{1-t}(-phi0^c). Throws NotCConcave when phi0 is not c-concave
/// within tol.
std::vector<Field> potential_flow(const Space& space, const Field& phi0, const std::vector<double>& times,
                                  double tol = 1e-9);

/// Parametrisation, potential optimality, representation of the gradient of
/// (1-t) phi_t by the restricted lifting, the continuity-equation sandwich
/// and the weak C1 modulus.
VerificationReport verify_geodesic(const Space& space, const GeodesicBundle& bundle, CalculusKind kind,
                                   const Config& config = {});

/// max over the sampled pairs (0,k), (k,K), (k,k+1) of |W2(mu_s, mu_t) - |s-t| W2(mu_0, mu_1)|.
double geodesic_parametrisation_error(const Space& space, const GeodesicBundle& bundle);

/// max_t of 1/2 W2^2(mu_t, mu_1) - [int psi_t d mu_t + int psi_t^c d mu_1],
/// psi_t = (1-t) Q_{1-t}(-phi0^c).
double potential_optimality_deficit(const Space& space, const GeodesicBundle& bundle);

/// max_k deficit of restrict(lifting, k, K) for the gradient of (1-t_k) phi_{t_k}.
double restricted_representation_deficit(const Space& space, const GeodesicBundle& bundle, CalculusKind kind);

}  // namespace mmflow
