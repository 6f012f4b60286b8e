#include "mmflow/curves.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/hopflax.hpp"
#include "mmflow/transport.hpp"

namespace mmflow {
namespace {

void check_times(const std::vector<double>& times) {
  if (times.size() < 2) throw Error(ErrorKind::kBadInput, "curve needs at least two times");
  if (std::abs(times.front()) > 1e-12 || std::abs(times.back() - 1.0) > 1e-12)
    throw Error(ErrorKind::kBadInput, "curve times must run from 0 to 1");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw Error(ErrorKind::kBadInput, "curve times must increase");
}

void require_quadratic(CalculusKind kind, const char* what) {
  if (kind != CalculusKind::kQuadratic)
    throw Error(ErrorKind::kBadInput, std::string(what) + " needs the quadratic calculus");
}

}  // namespace

double CurveSample::compression() const {
  double c = 0.0;
  for (const ProbMeasure& mu : measures) c = std::max(c, mu.compression());
  return c;
}

CurveSample make_curve(const Space& space, std::vector<double> times, const std::vector<Field>& densities) {
  if (densities.size() != times.size())
    throw Error(ErrorKind::kBadInput, "curve needs one density per time");
  std::vector<ProbMeasure> measures;
  for (const Field& rho : densities) measures.push_back(ProbMeasure::from_density(space, rho));
  return make_curve(std::move(times), std::move(measures));
}

CurveSample make_curve(std::vector<double> times, std::vector<ProbMeasure> measures) {
  check_times(times);
  if (measures.size() != times.size())
    throw Error(ErrorKind::kBadInput, "curve needs one measure per time");
  return {std::move(times), std::move(measures)};
}

std::vector<double> uniform_times(int steps) {
  if (steps < 1) throw Error(ErrorKind::kBadInput, "need at least one step");
  std::vector<double> t(steps + 1);
  for (int k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) / steps;
  return t;
}

double resolution(const Space& space) {
  if (space.grid()) return space.grid()->n;
  double longest = 0.0;
  for (const Edge& e : space.edges()) longest = std::max(longest, space.dist(e.a, e.b));
  return longest > 0.0 ? 1.0 / longest : 1.0;
}

SpeedSample metric_speed(const Space& space, const CurveSample& curve) {
  SpeedSample out;
  for (int k = 0; k < curve.steps(); ++k) {
    const double w = w2_distance(space, curve.measures[k], curve.measures[k + 1]);
    out.w2.push_back(w);
    out.speed.push_back(w / curve.dt(k));
    out.action += w * w / curve.dt(k);
  }
  return out;
}

double OperatorSample::action(const CurveSample& curve) const {
  double a = 0.0;
  for (std::size_t k = 0; k < norms.size(); ++k) a += norms[k] * norms[k] * curve.dt(static_cast<int>(k));
  return a;
}

OperatorSample extract_operator(const Space& space, const CurveSample& curve, CalculusKind kind,
                                const Config& config) {
  OperatorSample out;
  for (int k = 0; k < curve.steps(); ++k) {
    const Field& r0 = curve.measures[k].density();
    const Field& r1 = curve.measures[k + 1].density();
    Field ell = (r1 - r0).cwiseProduct(space.measure()) / curve.dt(k);
    Field mid = 0.5 * (r0 + r1);
    const DualNorm dn = dual_norm(space, kind, ell, mid, config.slope_iterations);
    out.norms.push_back(dn.norm);
    if (dn.phi) out.phi.push_back(*dn.phi);
    out.approximate = out.approximate || dn.approximate;
    out.ell.push_back(std::move(ell));
    out.mid_density.push_back(std::move(mid));
  }
  return out;
}

VerificationReport verify_main_theorem(const Space& space, const CurveSample& curve, CalculusKind kind,
                                       const Config& config, std::uint64_t seed) {
  require_quadratic(kind, "verify main");
  VerificationReport rep;
  rep.suite = "main";
  const double res = resolution(space);
  double max_dt = 0.0;
  for (int k = 0; k < curve.steps(); ++k) max_dt = std::max(max_dt, curve.dt(k));
  const double tol = config.tol(max_dt, res);
  rep.environment["steps"] = std::to_string(curve.steps());
  rep.environment["resolution"] = format_double(res);
  rep.environment["calculus"] = std::string(to_string(kind));
  rep.environment["seed"] = std::to_string(seed);

  const SpeedSample sp = metric_speed(space, curve);
  const OperatorSample op = extract_operator(space, curve, kind, config);
  const OTResult ends = solve_w2(space, curve.measures.front(), curve.measures.back());
  const double w2sq = ends.primal_value;
  const double action = op.action(curve);

  double speed_gap = 0.0;
  double max_norm = 0.0;
  double max_step = 0.0;
  for (int k = 0; k < curve.steps(); ++k) {
    speed_gap = std::max(speed_gap, std::abs(op.norms[k] - sp.speed[k]));
    max_norm = std::max(max_norm, op.norms[k]);
    max_step = std::max(max_step, sp.w2[k]);
  }
  rep.add("speed.norm_gap", "metric speed equals dual norm", speed_gap, 0.0, tol);
  rep.add("action.lower", "action bounds squared distance", w2sq - action, 0.0, tol);
  rep.add("action.metric", "metric action bounds squared distance", w2sq - sp.action, 0.0,
          config.exact * std::max(1.0, w2sq));
  rep.add("speed.modulus", "continuity modulus of the curve", max_step, max_norm * max_dt, tol);
  rep.note("action.norms", "sum of squared dual norms", action);
  rep.note("action.speeds", "sum of squared metric speeds", sp.action);
  rep.note("w2sq", "squared distance of the endpoints", w2sq);
  rep.note("compression", "bounded compression constant", curve.compression());

  // Kuwada battery.
  std::vector<Field> battery{Field(-ends.phi), ends.phi};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 6; ++i) {
    Field f(space.size());
    for (int x = 0; x < space.size(); ++x) f[x] = 2.0 * unit_double(rng) - 1.0;
    battery.push_back(std::move(f));
  }
  const double half_action = 0.5 * action;
  for (std::size_t b = 0; b < battery.size(); ++b) {
    const Field& phi = battery[b];
    std::vector<Field> q;
    for (double t : curve.times) q.push_back(hopf_lax(space, phi, t));
    const double part0 = q.back().dot(curve.measures.back().masses()) - phi.dot(curve.measures.front().masses());
    double part1 = 0.0;
    double part2 = 0.0;
    for (int k = 0; k < curve.steps(); ++k) {
      const double drift = (q[k + 1] - q[k]).dot(curve.measures[k + 1].masses());
      const double pair = op.ell[k].dot(q[k]);
      const double young = 0.5 * op.norms[k] * op.norms[k] +
                           0.5 * seminorm_sq(space, kind, q[k], op.mid_density[k]);
      part1 += drift + curve.dt(k) * pair;
      part2 += drift + curve.dt(k) * young;
    }
    const std::string id = "kuwada." + std::to_string(b);
    rep.add(id + ".bound", "Kuwada inequality", part0, half_action, tol);
    rep.add(id + ".telescope", "Kuwada chain telescoping", std::abs(part1 - part0), 0.0,
            config.exact * std::max(1.0, std::abs(part0)));
    rep.add(id + ".young", "Kuwada chain Young step", part1, part2, config.exact * std::max(1.0, std::abs(part2)));
    rep.note(id + ".remainder", "Hamilton-Jacobi remainder of the chain", part2 - half_action);
  }
  return rep;
}

VerificationReport benamou_brenier(const Space& space, const ProbMeasure& mu0, const ProbMeasure& mu1,
                                   const std::vector<CurveSample>& candidates, CalculusKind kind,
                                   const Config& config) {
  require_quadratic(kind, "Benamou-Brenier");
  if (candidates.empty()) throw Error(ErrorKind::kBadInput, "no candidate curves");
  VerificationReport rep;
  rep.suite = "bb";
  const double w2sq = solve_w2(space, mu0, mu1).primal_value;
  double best = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const CurveSample& cur = candidates[c];
    const double e0 = (cur.measures.front().masses() - mu0.masses()).cwiseAbs().maxCoeff();
    const double e1 = (cur.measures.back().masses() - mu1.masses()).cwiseAbs().maxCoeff();
    if (e0 > 1e-10 || e1 > 1e-10) {
      std::ostringstream os;
      os << "candidate " << c << " does not join the given endpoints";
      throw Error(ErrorKind::kEndpointMismatch, os.str());
    }
    for (int k = 0; k < cur.steps(); ++k) max_dt = std::max(max_dt, cur.dt(k));
    const double a = extract_operator(space, cur, kind, config).action(cur);
    rep.note("candidate." + std::to_string(c) + ".action", "action of a candidate curve", a);
    best = std::min(best, a);
  }
  const double tol = config.tol(max_dt, resolution(space));
  rep.add("bb.lower", "dynamic formulation bounds the distance", w2sq - best, 0.0, tol);
  rep.note("bb.gap", "best action minus squared distance", best - w2sq);
  rep.note("w2sq", "squared distance of the endpoints", w2sq);
  return rep;
}

VerificationReport w2_derivative(const Space& space, const CurveSample& curve, const ProbMeasure& nu,
                                 CalculusKind kind, const Config& config) {
  require_quadratic(kind, "W2 derivative");
  VerificationReport rep;
  rep.suite = "derw2";
  const int steps = curve.steps();
  std::vector<double> half;
  std::vector<Field> phi;
  double gap = 0.0;
  for (const ProbMeasure& mu : curve.measures) {
    const OTResult r = solve_w2(space, mu, nu);
    half.push_back(0.5 * r.primal_value);
    phi.push_back(r.phi);
    gap = std::max(gap, r.gap());
  }
  std::vector<Field> ell;
  for (int k = 0; k < steps; ++k)
    ell.push_back((curve.measures[k + 1].density() - curve.measures[k].density())
                      .cwiseProduct(space.measure()) / curve.dt(k));

  double left = -std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  double slack = 0.0;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      const double dt = curve.dt(k - 1);
      left = std::max(left, (half[k] - half[k - 1]) / dt - ell[k - 1].dot(phi[k]));
      slack = std::max(slack, 2.0 * gap / dt);
    }
    if (k < steps) {
      const double dt = curve.dt(k);
      right = std::max(right, ell[k].dot(phi[k]) - (half[k + 1] - half[k]) / dt);
      slack = std::max(slack, 2.0 * gap / dt);
    }
  }
  const double tol = config.exact + slack;
  rep.add("derw2.left", "backward difference below the potential pairing", left, 0.0, tol);
  rep.add("derw2.right", "forward difference above the potential pairing", right, 0.0, tol);
  double central = 0.0;
  for (int k = 1; k < steps; ++k) {
    const double span = curve.times[k + 1] - curve.times[k - 1];
    const double pairing =
        phi[k].dot(curve.measures[k + 1].masses() - curve.measures[k - 1].masses()) / span;
    central = std::max(central, std::abs((half[k + 1] - half[k - 1]) / span - pairing));
  }
  rep.note("derw2.central", "central difference residual", central);
  return rep;
}

double w2_derivative_residual(const Space& space, const CurveSample& curve, const ProbMeasure& nu) {
  const int steps = curve.steps();
  std::vector<double> half;
  std::vector<Field> phi;
  for (const ProbMeasure& mu : curve.measures) {
    const OTResult r = solve_w2(space, mu, nu);
    half.push_back(0.5 * r.primal_value);
    phi.push_back(r.phi);
  }
  double worst = 0.0;
  for (int k = 1; k < steps; ++k) {
    const double span = curve.times[k + 1] - curve.times[k - 1];
    const double central = (half[k + 1] - half[k - 1]) / span;
    // Rate of t -> int phi_k d mu_t at t_k from the neighbouring densities.
    const double pairing = phi[k].dot(curve.measures[k + 1].masses() - curve.measures[k - 1].masses()) / span;
    worst = std::max(worst, std::abs(central - pairing));
  }
  return worst;
}

}  // namespace mmflow
