#include "mmflow/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mmflow/error.hpp"
#include "mmflow/transport.hpp"

namespace mmflow {

void validate_plan(const Space& space, const Plan& plan) {
  if (plan.times.size() < 2) throw Error(ErrorKind::kBadInput, "plan needs at least two times");
  for (std::size_t k = 1; k < plan.times.size(); ++k)
    if (!(plan.times[k] > plan.times[k - 1])) throw Error(ErrorKind::kBadInput, "plan times must increase");
  if (plan.paths.size() != plan.weights.size() || plan.paths.empty())
    throw Error(ErrorKind::kBadInput, "plan needs one weight per path");
  double total = 0.0;
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    if (plan.paths[p].size() != plan.times.size())
      throw Error(ErrorKind::kBadInput, "every path must visit one point per time");
    for (int x : plan.paths[p])
      if (x < 0 || x >= space.size()) throw Error(ErrorKind::kBadInput, "path point out of range");
    if (!(plan.weights[p] >= 0.0)) throw Error(ErrorKind::kBadInput, "path weights must be nonnegative");
    total += plan.weights[p];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "path weights sum to " << total;
    throw Error(ErrorKind::kBadInput, os.str());
  }
}

Field marginal(const Space& space, const Plan& plan, int k) {
  Field out = Field::Zero(space.size());
  for (std::size_t p = 0; p < plan.paths.size(); ++p) out[plan.paths[p][k]] += plan.weights[p];
  return out;
}

double kinetic_action(const Space& space, const Plan& plan) {
  double total = 0.0;
  for (std::size_t p = 0; p < plan.paths.size(); ++p)
    for (int k = 0; k < plan.steps(); ++k) {
      const double d = space.dist(plan.paths[p][k], plan.paths[p][k + 1]);
      total += plan.weights[p] * d * d / (plan.times[k + 1] - plan.times[k]);
    }
  return total;
}

void normalize_plan(Plan& plan) {
  std::vector<std::size_t> order(plan.paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return plan.paths[a] < plan.paths[b]; });
  Plan out;
  out.times = plan.times;
  for (std::size_t i : order) {
    if (!out.paths.empty() && out.paths.back() == plan.paths[i]) {
      out.weights.back() += plan.weights[i];
    } else {
      out.paths.push_back(plan.paths[i]);
      out.weights.push_back(plan.weights[i]);
    }
  }
  plan = std::move(out);
}

Plan lift_from_couplings(const Space& space, const CurveSample& curve, const std::vector<Coupling>& couplings,
                         long max_paths) {
  const int steps = curve.steps();
  const int n = space.size();
  if (static_cast<int>(couplings.size()) != steps)
    throw Error(ErrorKind::kMarginalMismatch, "need one coupling per curve step");
  std::vector<Field> rows;
  for (int k = 0; k < steps; ++k) {
    const Eigen::MatrixXd& g = couplings[k].mass;
    if (g.rows() != n || g.cols() != n) throw Error(ErrorKind::kMarginalMismatch, "coupling shape");
    const MarginalDeficit def = check_coupling(couplings[k], curve.measures[k], curve.measures[k + 1]);
    if (def.max() > 1e-10) {
      std::ostringstream os;
      os << "coupling " << k << " misses its marginals by " << def.max();
      throw Error(ErrorKind::kMarginalMismatch, os.str());
    }
    rows.push_back(g.rowwise().sum());
  }

  Plan plan;
  plan.times = curve.times;
  std::vector<int> path(steps + 1);
  // Depth-first expansion of the Markov chain.
  auto expand = [&](auto&& self, int k, double w) -> void {
    if (k == steps) {
      if (static_cast<long>(plan.paths.size()) >= max_paths) {
        std::ostringstream os;
        os << "lifting exceeds " << max_paths << " paths";
        throw Error(ErrorKind::kTooManyPaths, os.str());
      }
      plan.paths.push_back(path);
      plan.weights.push_back(w);
      return;
    }
    const int x = path[k];
    const double row = rows[k][x];
    if (!(row > 0.0)) return;
    for (int y = 0; y < n; ++y) {
      const double g = couplings[k].mass(x, y);
      if (g > 0.0) {
        path[k + 1] = y;
        self(self, k + 1, w * g / row);
      }
    }
  };
  const Field& mu0 = curve.measures.front().masses();
  for (int x = 0; x < n; ++x)
    if (mu0[x] > 0.0) {
      path[0] = x;
      expand(expand, 0, mu0[x]);
    }
  // Renormalise away rounding so the weights sum to one.
  const double total = std::accumulate(plan.weights.begin(), plan.weights.end(), 0.0);
  for (double& w : plan.weights) w /= total;
  normalize_plan(plan);
  return plan;
}

Plan lift_curve(const Space& space, const CurveSample& curve, long max_paths) {
  std::vector<Coupling> couplings;
  for (int k = 0; k < curve.steps(); ++k)
    couplings.push_back(solve_w2(space, curve.measures[k], curve.measures[k + 1]).coupling);
  return lift_from_couplings(space, curve, couplings, max_paths);
}

TestPlanCheck is_test_plan(const Space& space, const Plan& plan, double compression) {
  TestPlanCheck out;
  for (int k = 0; k <= plan.steps(); ++k) {
    const Field density = marginal(space, plan, k).cwiseQuotient(space.measure());
    Eigen::Index arg = 0;
    const double top = density.maxCoeff(&arg);
    if (top > out.max_density) {
      out.max_density = top;
      out.witness_time = k;
      out.witness_point = static_cast<int>(arg);
    }
  }
  out.action = kinetic_action(space, plan);
  out.ok = std::isfinite(out.action) && out.max_density <= compression * (1.0 + 1e-12);
  return out;
}

GradientRepresentation represents_gradient(const Space& space, const Plan& plan, const Field& g,
                                           CalculusKind kind) {
  const double dt = plan.times[1] - plan.times[0];
  const Field dg2 = grad_modulus_sq(space, kind, g);
  GradientRepresentation out;
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    const int x0 = plan.paths[p][0];
    const int x1 = plan.paths[p][1];
    const double speed = space.dist(x0, x1) / dt;
    const double w = plan.weights[p];
    out.a += w * (g[x1] - g[x0]) / dt;
    out.b += w * 0.5 * (dg2[x0] + speed * speed);
  }
  return out;
}

HorverReport verify_horver(const Space& space, const Plan& plan, const Field& f, const Field& g,
                           CalculusKind kind, double represent_tol) {
  const double dt = plan.times[1] - plan.times[0];
  HorverReport rep;
  rep.deficit = represents_gradient(space, plan, g, kind).deficit();
  rep.vacuous = rep.deficit > represent_tol;

  const Dpm limits = dpm(space, kind, f, g);
  const Field dg2 = grad_modulus_sq(space, kind, g);
  std::vector<double> e_g(plan.paths.size()), slope_f(plan.paths.size());
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    const int x0 = plan.paths[p][0];
    const int x1 = plan.paths[p][1];
    const double speed = space.dist(x0, x1) / dt;
    slope_f[p] = (f[x1] - f[x0]) / dt;
    e_g[p] = (g[x1] - g[x0]) / dt - 0.5 * dg2[x0] - 0.5 * speed * speed;
    rep.middle += plan.weights[p] * slope_f[p];
    rep.int_minus += plan.weights[p] * limits.minus[x0];
    rep.int_plus += plan.weights[p] * limits.plus[x0];
  }
  // The deficit equals -sum w e_g; summing the same terms keeps delta + Y
  // free of rounding that small eps would amplify.
  double delta = 0.0;
  for (std::size_t p = 0; p < plan.paths.size(); ++p) delta -= plan.weights[p] * e_g[p];

  rep.upper = std::numeric_limits<double>::infinity();
  rep.lower = -std::numeric_limits<double>::infinity();
  for (int k = -40; k <= 20; ++k) {
    for (double eps : {std::ldexp(1.0, k), -std::ldexp(1.0, k)}) {
      const Field q = dpm_quotient(space, kind, f, g, eps);
      // Young excess of h = g + eps f, using |Dh|^2 = |Dg|^2 + 2 eps q so
      // that small eps does not cancel.
      double avg = 0.0;
      double young = 0.0;
      for (std::size_t p = 0; p < plan.paths.size(); ++p) {
        const double qp = q[plan.paths[p][0]];
        avg += plan.weights[p] * qp;
        young += plan.weights[p] * std::max(0.0, e_g[p] + eps * (slope_f[p] - qp));
      }
      const double slack = (delta + young) / eps;
      if (eps > 0.0) rep.upper = std::min(rep.upper, avg + slack);
      else rep.lower = std::max(rep.lower, avg + slack);
    }
  }
  return rep;
}

Plan restrict_plan(const Plan& plan, int k, int l) {
  const int steps = plan.steps();
  if (k < 0 || l > steps || k >= l) {
    std::ostringstream os;
    os << "cannot restrict to [" << k << ", " << l << "] of " << steps << " steps";
    throw Error(ErrorKind::kBadIndices, os.str());
  }
  Plan out;
  const double t0 = plan.times[k];
  const double span = plan.times[l] - t0;
  for (int i = k; i <= l; ++i) out.times.push_back((plan.times[i] - t0) / span);
  out.times.back() = 1.0;
  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    out.paths.emplace_back(plan.paths[p].begin() + k, plan.paths[p].begin() + l + 1);
    out.weights.push_back(plan.weights[p]);
  }
  normalize_plan(out);
  return out;
}

}  // namespace mmflow
