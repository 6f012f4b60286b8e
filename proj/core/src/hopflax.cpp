#include "mmflow/hopflax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmflow/calculus.hpp"
#include "mmflow/error.hpp"

namespace mmflow {
namespace {

double piece(const Space& space, const Field& f, int x, int y, double t) {
  const double d = space.dist(x, y);
  return f[y] + d * d / (2.0 * t);
}

double tie_tol(double v) { return 1e-13 * std::max(1.0, std::abs(v)); }

std::vector<int> argmin_set(const Space& space, const Field& f, int x, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < space.size(); ++y) best = std::min(best, piece(space, f, x, y, t));
  std::vector<int> out;
  for (int y = 0; y < space.size(); ++y)
    if (piece(space, f, x, y, t) <= best + tie_tol(best)) out.push_back(y);
  return out;
}

}  // namespace

Field hopf_lax(const Space& space, const Field& f, double t) {
  if (t < 0.0) throw Error(ErrorKind::kBadInput, "Hopf-Lax time must be nonnegative");
  if (t == 0.0) return f;
  const int n = space.size();
  Field out(n);
  for (int x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (int y = 0; y < n; ++y) best = std::min(best, piece(space, f, x, y, t));
    out[x] = best;
  }
  return out;
}

Field minimiser_reach(const Space& space, const Field& f, double t) {
  Field out = Field::Zero(space.size());
  if (t == 0.0) return out;
  for (int x = 0; x < space.size(); ++x)
    for (int y : argmin_set(space, f, x, t)) out[x] = std::max(out[x], space.dist(x, y));
  return out;
}

HLTrajectory hl_trajectory(const Space& space, const Field& f, const std::vector<double>& times) {
  HLTrajectory tr;
  tr.times = times;
  for (double t : times) {
    tr.values.push_back(hopf_lax(space, f, t));
    tr.lips.push_back(local_slope(space, tr.values.back()));
  }
  return tr;
}

double hl_fixed_time(const Space& space, const Field& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int x = 0; x < space.size(); ++x)
    for (int y = 0; y < space.size(); ++y)
      if (f[x] > f[y]) {
        const double d = space.dist(x, y);
        best = std::min(best, d * d / (2.0 * (f[x] - f[y])));
      }
  return best;
}

HLReport verify_hl(const Space& space, const Field& f, const std::vector<double>& times) {
  if (times.size() < 3) throw Error(ErrorKind::kBadInput, "time grid needs at least 3 points");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1])))
      throw Error(ErrorKind::kBadInput, "time grid must be positive and increasing");
  const int n = space.size();
  HLReport rep;
  rep.hj_raw = rep.hj_excess = -std::numeric_limits<double>::infinity();
  const double lip_f = global_lipschitz(space, f);
  const HLTrajectory tr = hl_trajectory(space, f, times);
  rep.fixed_time = hl_fixed_time(space, f);

  std::vector<Field> reach;
  for (double t : times) reach.push_back(minimiser_reach(space, f, t));

  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const Field& q = tr.values[k];
    if (lip_f > 0.0) rep.lip_ratio = std::max(rep.lip_ratio, global_lipschitz(space, q) / lip_f);
    rep.above_f = std::max(rep.above_f, (q - f).maxCoeff());
    if (k > 0) rep.increase = std::max(rep.increase, (q - tr.values[k - 1]).maxCoeff());
    if (t <= rep.fixed_time) rep.fixed_violation = std::max(rep.fixed_violation, (q - f).cwiseAbs().maxCoeff());
    if (k + 1 == times.size()) continue;

    const double h = times[k + 1] - t;
    const Field& d = reach[k];
    bool kinked_here = false;
    for (int x = 0; x < n; ++x) {
      const auto now = argmin_set(space, f, x, t);
      // Minimisers at different distances: two pieces cross exactly at t.
      for (int y : now) kinked_here = kinked_here || std::abs(space.dist(x, y) - d[x]) > 1e-12;
      const auto next = argmin_set(space, f, x, t + h);
      bool shared = false;
      for (int y : now) shared = shared || std::find(next.begin(), next.end(), y) != next.end();
      if (!shared) {
        ++rep.kinks;
        kinked_here = true;
        continue;
      }
      const double r = (tr.values[k + 1][x] - q[x]) / h + 0.5 * tr.lips[k][x] * tr.lips[k][x];
      double lhat = 0.0;
      for (const Neighbor& nb : space.neighbors(x))
        lhat = std::max(lhat, (std::max(d[x], d[nb.point]) + 0.5 * nb.dist) / t);
      const double tau = d[x] * d[x] * h / (2.0 * t * t * (t + h));
      const double sigma = 0.5 * (lhat * lhat - d[x] * d[x] / (t * t));
      ++rep.hj_checked;
      rep.hj_raw = std::max(rep.hj_raw, r);
      rep.hj_excess = std::max(rep.hj_excess, r - (tau + sigma));
      rep.hj_allowance_max = std::max(rep.hj_allowance_max, tau + sigma);
      rep.hj_k = std::max(rep.hj_k, d[x] * d[x] / (2.0 * t * t * t));
    }
    if (kinked_here) rep.kink_times.push_back(t);
  }
  if (rep.hj_checked == 0) rep.hj_raw = rep.hj_excess = 0.0;

  const std::size_t stride = std::max<std::size_t>(1, times.size() / 8);
  for (std::size_t i = 0; i < times.size(); i += stride)
    for (std::size_t j = 0; j < times.size(); j += stride) {
      const Field lhs = hopf_lax(space, tr.values[j], times[i]);
      const Field rhs = hopf_lax(space, f, times[i] + times[j]);
      rep.semigroup = std::max(rep.semigroup, (rhs - lhs).maxCoeff());
    }
  return rep;
}

}  // namespace mmflow
