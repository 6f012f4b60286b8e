#pragma once

#include <vector>

#include "mmflow/calculus.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/space.hpp"

namespace mmflow {

/// Weighted family of discrete paths on a shared time grid.
struct Plan {
  std::vector<double> times;
  std::vector<std::vector<int>> paths;  // point indices, one per time
  std::vector<double> weights;

  int steps() const { return static_cast<int>(times.size()) - 1; }
};

/// Checks shapes, nonnegative weights summing to 1 and point ranges.
void validate_plan(const Space& space, const Plan& plan);

/// Masses of (e_{t_k}) pushed forward by the plan.
Field marginal(const Space& space, const Plan& plan, int k);

/// sum_paths w sum_k d(g_k, g_{k+1})^2 / dt_k.
double kinetic_action(const Space& space, const Plan& plan);

/// Markov chaining: weight mu_0(x_0) prod_k gamma_k(x_k, x_{k+1}) / mu_k(x_k).
/// Throws MarginalMismatch if a coupling's marginals miss the curve by more
/// than 1e-10, TooManyPaths past max_paths.
Plan lift_from_couplings(const Space& space, const CurveSample& curve, const std::vector<Coupling>& couplings,
                         long max_paths = 1000000);

/// Lift along optimal couplings of consecutive measures.
Plan lift_curve(const Space& space, const CurveSample& curve, long max_paths = 1000000);

struct TestPlanCheck {
  bool ok = false;
  double max_density = 0.0;
  int witness_time = -1;
  int witness_point = -1;
  double action = 0.0;
};

TestPlanCheck is_test_plan(const Space& space, const Plan& plan, double compression);

struct GradientRepresentation {
  double a = 0.0;  // sum w (g(g_1) - g(g_0)) / dt_0
  double b = 0.0;  // 1/2 sum w |Dg|^2(g_0) + 1/2 sum w (d(g_1, g_0) / dt_0)^2
  double deficit() const { return b - a; }
};

GradientRepresentation represents_gradient(const Space& space, const Plan& plan, const Field& g,
                                           CalculusKind kind);

/// First-step sandwich. For every eps > 0
///   A(f) <= sum w q_eps(g_0) + (delta + Y(g + eps f)) / eps,
/// and the mirrored lower bound for eps < 0, where q_eps is the difference
/// quotient of |D(g + eps f)|^2 / 2, delta the representation deficit of g and
/// Y(h) = sum w max(0, (h(g_1) - h(g_0))/dt - |Dh|^2(g_0)/2 - speed^2/2) the
/// pathwise Young excess. lower/upper are the best bounds over eps = +-2^k,
/// k = -40..20; int_minus/int_plus are the limiting values sum w D-+f(grad g).
struct HorverReport {
  double middle = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double int_minus = 0.0;
  double int_plus = 0.0;
  double deficit = 0.0;
  bool vacuous = false;  // deficit above the representation tolerance

  bool holds(double tol) const { return lower - tol <= middle && middle <= upper + tol; }
};

HorverReport verify_horver(const Space& space, const Plan& plan, const Field& f, const Field& g,
                           CalculusKind kind, double represent_tol = 1e-8);

/// Segment [t_k, t_l] of every path, times mapped affinely onto [0, 1];
/// identical segments are merged.
Plan restrict_plan(const Plan& plan, int k, int l);

/// Sorts paths lexicographically and merges duplicates.
void normalize_plan(Plan& plan);

}  // namespace mmflow
