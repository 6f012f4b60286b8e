#pragma once

#include <vector>

#include "mmflow/space.hpp"

namespace mmflow {

/// Optimal transport for the cost c(x,y) = d(x,y)^2 / 2.
struct OTResult {
  double w2 = 0.0;
  double primal_value = 0.0;  // sum gamma d^2
  double dual_value = 0.0;    // sum phi mu + sum phi_c nu
  Coupling coupling;
  Field phi;    // c-concave, zero at the first support point of mu
  Field phi_c;  // c-transform of phi
  int pivots = 0;

  double gap() const;
};

/// phi^c(y) = min_x d(x,y)^2/2 - phi(x).
Field c_transform(const Space& space, const Field& phi);

/// Same minimum restricted to x with mask[x] != 0.
Field c_transform_over(const Space& space, const Field& phi, const std::vector<char>& mask);

struct CConcavity {
  bool ok = false;
  double deficit = 0.0;  // max_x |phi^cc(x) - phi(x)|
};

CConcavity is_c_concave(const Space& space, const Field& phi, double tol = 1e-12);

/// Exact solve by the transportation simplex over the supports of mu and nu.
OTResult solve_w2(const Space& space, const ProbMeasure& mu, const ProbMeasure& nu);

double w2_distance(const Space& space, const ProbMeasure& mu, const ProbMeasure& nu);

/// max over gamma(x,y) > 0 of |phi(x) + phi_c(y) - d(x,y)^2/2|.
double slackness_residual(const Space& space, const OTResult& r);

/// Optimal value and plan of min sum c_ij g_ij subject to row sums a and
/// column sums b (a and b strictly positive, equal totals). u and v are dual
/// potentials with u_i + v_j <= c_ij and equality on the basis.
struct TransportLP {
  Eigen::MatrixXd plan;
  Field u;
  Field v;
  double cost = 0.0;
  int pivots = 0;
};

TransportLP solve_transportation(const Eigen::MatrixXd& cost, const Field& a, const Field& b);

}  // namespace mmflow
