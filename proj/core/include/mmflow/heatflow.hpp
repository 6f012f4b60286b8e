#pragma once

#include <vector>

#include "mmflow/calculus.hpp"
#include "mmflow/config.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/report.hpp"
#include "mmflow/space.hpp"

namespace mmflow {

/// (Delta f)(x) = sum_y w_xy (f(y) - f(x)) / m(x).
Field laplacian(const Space& space, const Field& f);

/// Energy E(f) = 1/2 sum |Df|^2 m for the quadratic calculus.
double dirichlet_energy(const Space& space, const Field& f);

struct HeatTrajectory {
  std::vector<double> times;
  std::vector<Field> densities;
  std::vector<Field> laplacians;
  std::vector<double> energies;

  double dt() const { return times[1] - times[0]; }
};

/// Implicit Euler (M + dt K) rho_{k+1} = M rho_k with K the stiffness matrix
/// of the Dirichlet form, factorised once. The number of steps is
/// round(T / dt) and the last time is exactly T.
HeatTrajectory run_heat_flow(const Space& space, const Field& rho0, double horizon, double dt);

/// Heat trajectory on [0, horizon] as a curve on [0, 1], sampling every
/// stride-th step.
CurveSample heat_curve(const Space& space, const HeatTrajectory& traj, int stride = 1);

/// Mass, maximum principle, dissipation and the convexity inequality
/// eps (f . Delta rho) m <= E(rho - eps f) - E(rho).
VerificationReport verify_heat_invariants(const Space& space, const HeatTrajectory& traj,
                                          const Config& config = {});

struct HeatContinuity {
  double central = 0.0;     // max |central difference - pairing| over interior steps and f
  double one_sided = 0.0;   // same for the backward difference at t_{k+1}, exact for implicit Euler
  double sandwich = 0.0;    // max violation of -int D+ <= central <= -int D-
  double chain_form = 0.0;  // max |pairing - int grad f . grad(-log rho) d mu|
};

/// Continuity equation of the heat flow checked on a battery of f.
/// Quadratic calculus only.
HeatContinuity verify_heat_continuity(const Space& space, const HeatTrajectory& traj, CalculusKind kind,
                                      const std::vector<Field>& battery);

struct WeakC1 {
  double modulus = 0.0;  // K = max |second difference| / dt^2
};

/// Second differences of t -> int f rho_t dm over the battery.
WeakC1 verify_weak_c1(const Space& space, const std::vector<double>& times, const std::vector<Field>& densities,
                      const std::vector<Field>& battery);

}  // namespace mmflow
