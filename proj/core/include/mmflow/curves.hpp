#pragma once

#include <cstdint>
#include <vector>

#include "mmflow/calculus.hpp"
#include "mmflow/config.hpp"
#include "mmflow/report.hpp"
#include "mmflow/space.hpp"

namespace mmflow {

/// Measures sampled on 0 = t_0 < ... < t_K = 1.
struct CurveSample {
  std::vector<double> times;
  std::vector<ProbMeasure> measures;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  double dt(int k) const { return times[k + 1] - times[k]; }
  double compression() const;
};

CurveSample make_curve(const Space& space, std::vector<double> times, const std::vector<Field>& densities);
CurveSample make_curve(std::vector<double> times, std::vector<ProbMeasure> measures);

/// Uniform grid k/K, k = 0..K.
std::vector<double> uniform_times(int steps);

/// Grid cells per side for grid spaces, otherwise 1 / (longest edge).
double resolution(const Space& space);

struct SpeedSample {
  std::vector<double> w2;     // W2(mu_k, mu_{k+1})
  std::vector<double> speed;  // w2 / dt
  double action = 0.0;        // sum speed^2 dt
};

SpeedSample metric_speed(const Space& space, const CurveSample& curve);

/// l_k = (rho_{k+1} - rho_k) m / dt_k and N_k = ||l_k||* at the average of
/// mu_k and mu_{k+1}.
struct OperatorSample {
  std::vector<Field> ell;
  std::vector<double> norms;
  std::vector<Field> phi;  // quadratic kind only
  std::vector<Field> mid_density;
  bool approximate = false;

  double action(const CurveSample& curve) const;  // sum N_k^2 dt_k
};

OperatorSample extract_operator(const Space& space, const CurveSample& curve, CalculusKind kind,
                                const Config& config = {});

/// Speed/norm agreement, the action lower bound and the Kuwada inequality for
/// a battery of potentials (random, plus -phi and phi for the endpoint
/// Kantorovich potential phi). Quadratic calculus only.
VerificationReport verify_main_theorem(const Space& space, const CurveSample& curve, CalculusKind kind,
                                       const Config& config = {}, std::uint64_t seed = 0);

/// Minimum action over candidate curves against W2^2 of the endpoints.
VerificationReport benamou_brenier(const Space& space, const ProbMeasure& mu0, const ProbMeasure& mu1,
                                   const std::vector<CurveSample>& candidates, CalculusKind kind,
                                   const Config& config = {});

/// Derivative of t -> W2^2(mu_t, nu) / 2 against l(phi_t): the one-sided
/// sandwich exactly, the central residual as a report value.
VerificationReport w2_derivative(const Space& space, const CurveSample& curve, const ProbMeasure& nu,
                                 CalculusKind kind, const Config& config = {});

/// max_k |central difference of 1/2 W2^2(mu_., nu) - l(phi_k)| over interior k.
double w2_derivative_residual(const Space& space, const CurveSample& curve, const ProbMeasure& nu);

}  // namespace mmflow
