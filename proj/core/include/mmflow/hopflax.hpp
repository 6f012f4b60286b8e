#pragma once

#include <vector>

#include "mmflow/space.hpp"

namespace mmflow {

/// Q_t f(x) = min_y f(y) + d(x,y)^2 / (2t); Q_0 f = f.
Field hopf_lax(const Space& space, const Field& f, double t);

/// Largest distance from x to a minimiser of the Hopf-Lax problem at t.
Field minimiser_reach(const Space& space, const Field& f, double t);

struct HLTrajectory {
  std::vector<double> times;
  std::vector<Field> values;
  std::vector<Field> lips;
};

HLTrajectory hl_trajectory(const Space& space, const Field& f, const std::vector<double>& times);

/// Largest t with Q_t f = f: min over f(x) > f(y) of d^2 / (2 (f(x) - f(y))).
double hl_fixed_time(const Space& space, const Field& f);

struct HLReport {
  double lip_ratio = 0.0;         // max_t Lip(Q_t f) / Lip(f); 0 when f is constant
  double hj_raw = 0.0;            // max forward-difference residual, kinks excluded
  double hj_excess = 0.0;         // max residual minus its rigorous allowance
  double hj_allowance_max = 0.0;  // max allowance used
  double hj_k = 0.0;              // max_t D^2 / (2 t^3): time part of the allowance per unit h
  int hj_checked = 0;             // (t, x) pairs tested
  int kinks = 0;                  // excluded (t, x) pairs where the active minimiser changed
  std::vector<double> kink_times;
  double above_f = 0.0;           // max (Q_t f - f), must be <= 0
  double increase = 0.0;          // max (Q_t f - Q_s f) for s < t, must be <= 0
  double fixed_time = 0.0;        // t* with Q_t f = f for t <= t*
  double fixed_violation = 0.0;   // max |Q_t f - f| over grid t <= t*
  double semigroup = 0.0;         // max (Q_{t+s} f - Q_t Q_s f) over grid pairs, must be <= 0
};

/// Checks the Lipschitz bound, the Hamilton-Jacobi subsolution inequality
/// (forward differences with the allowance
///   D^2 h / (2 t^2 (t+h)) + (lhat^2 - D^2 / t^2) / 2,
/// D the minimiser reach at x and lhat = max_z (max(D_x, D_z) + d(x,z)/2) / t
/// over edge neighbours z), monotonicity in t and convergence to f.
HLReport verify_hl(const Space& space, const Field& f, const std::vector<double>& times);

}  // namespace mmflow
