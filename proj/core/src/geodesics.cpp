#include "mmflow/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/heatflow.hpp"
#include "mmflow/hopflax.hpp"
#include "mmflow/transport.hpp"

namespace mmflow {
namespace {

struct Split {
  int lo = 0;
  double theta = 0.0;  // mass fraction at lo + 1
};

Split split_at(double a, double b, double t, int cells) {
  const double p = (1.0 - t) * a + t * b;
  Split s;
  s.lo = static_cast<int>(std::floor(p));
  s.theta = p - s.lo;
  if (s.theta > 1.0 - 1e-12) {
    ++s.lo;
    s.theta = 0.0;
  } else if (s.theta < 1e-12) {
    s.theta = 0.0;
  }
  s.lo = std::clamp(s.lo, 0, cells);
  if (s.lo == cells) s.theta = 0.0;
  return s;
}

// Comonotone lift of one axis: paths of grid coordinates with weights.
std::vector<std::pair<std::vector<int>, double>> axis_lift(int a, int b, const std::vector<double>& times, int cells) {
  std::vector<Split> splits;
  std::vector<double> cuts{0.0, 1.0};
  for (double t : times) {
    splits.push_back(split_at(a, b, t, cells));
    if (splits.back().theta > 0.0) cuts.push_back(1.0 - splits.back().theta);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<std::vector<int>, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = cuts[i + 1] - cuts[i];
    if (!(w > 0.0)) continue;
    const double u = 0.5 * (cuts[i] + cuts[i + 1]);
    std::vector<int> coords;
    for (const Split& s : splits) coords.push_back(u < 1.0 - s.theta ? s.lo : s.lo + 1);
    out.emplace_back(std::move(coords), w);
  }
  return out;
}

}  // namespace

GeodesicBundle displacement_interpolation(const Space& space, const ProbMeasure& mu0, const ProbMeasure& mu1,
                                          const std::vector<double>& times) {
  if (!space.grid())
    throw Error(ErrorKind::kUnsupportedSpace, "displacement interpolation needs a 1D or 2D grid space");
  const GridShape grid = *space.grid();
  const int side = grid.n + 1;
  const int n = space.size();
  const int steps = static_cast<int>(times.size()) - 1;
  const OTResult ot = solve_w2(space, mu0, mu1);

  std::vector<Field> masses(times.size(), Field::Zero(n));
  Plan plan;
  plan.times = times;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double g = ot.coupling.mass(x, y);
      if (!(g > 0.0)) continue;
      if (grid.dim == 1) {
        for (const auto& [coords, w] : axis_lift(x, y, times, grid.n)) {
          plan.paths.push_back(coords);
          plan.weights.push_back(g * w);
        }
      } else {
        const auto rows = axis_lift(x / side, y / side, times, grid.n);
        const auto cols = axis_lift(x % side, y % side, times, grid.n);
        for (const auto& [rc, rw] : rows)
          for (const auto& [cc, cw] : cols) {
            std::vector<int> path(times.size());
            for (std::size_t k = 0; k < times.size(); ++k) path[k] = rc[k] * side + cc[k];
            plan.paths.push_back(std::move(path));
            plan.weights.push_back(g * rw * cw);
          }
      }
    }
  double total = 0.0;
  for (double w : plan.weights) total += w;
  for (double& w : plan.weights) w /= total;
  normalize_plan(plan);
  for (std::size_t p = 0; p < plan.paths.size(); ++p)
    for (int k = 0; k <= steps; ++k) masses[k][plan.paths[p][k]] += plan.weights[p];

  std::vector<ProbMeasure> measures;
  for (const Field& mk : masses) measures.push_back(ProbMeasure::from_masses(space, mk));

  GeodesicBundle out{make_curve(times, std::move(measures)), ot.phi, {}, std::move(plan), ot.w2};
  out.potentials = potential_flow(space, ot.phi, times);
  return out;
}

std::vector<Field> potential_flow(const Space& space, const Field& phi0, const std::vector<double>& times,
                                  double tol) {
  const CConcavity cc = is_c_concave(space, phi0, tol);
  if (!cc.ok) {
    std::ostringstream os;
    os << "potential is not c-concave (deficit " << cc.deficit << ")";
    throw Error(ErrorKind::kNotCConcave, os.str());
  }
  const Field neg = -c_transform(space, phi0);
  std::vector<Field> out;
  for (double t : times) out.push_back(-hopf_lax(space, neg, std::max(0.0, 1.0 - t)));
  return out;
}

double geodesic_parametrisation_error(const Space& space, const GeodesicBundle& bundle) {
  const CurveSample& c = bundle.curve;
  const int steps = c.steps();
  double worst = 0.0;
  auto pair = [&](int s, int t) {
    const double w = w2_distance(space, c.measures[s], c.measures[t]);
    worst = std::max(worst, std::abs(w - std::abs(c.times[t] - c.times[s]) * bundle.w2));
  };
  for (int k = 0; k < steps; ++k) {
    pair(k, k + 1);
    if (k > 0) {
      pair(0, k);
      pair(k, steps);
    }
  }
  return worst;
}

double potential_optimality_deficit(const Space& space, const GeodesicBundle& bundle) {
  const CurveSample& c = bundle.curve;
  const ProbMeasure& mu1 = c.measures.back();
  double worst = 0.0;
  for (int k = 0; k <= c.steps(); ++k) {
    const double t = c.times[k];
    const Field psi = -(1.0 - t) * bundle.potentials[k];
    const double dual = psi.dot(c.measures[k].masses()) + c_transform(space, psi).dot(mu1.masses());
    const double half = 0.5 * solve_w2(space, c.measures[k], mu1).primal_value;
    worst = std::max(worst, half - dual);
  }
  return worst;
}

double restricted_representation_deficit(const Space& space, const GeodesicBundle& bundle, CalculusKind kind) {
  const CurveSample& c = bundle.curve;
  double worst = 0.0;
  for (int k = 0; k < c.steps(); ++k) {
    const Plan sub = restrict_plan(bundle.lifting, k, c.steps());
    const Field g = (1.0 - c.times[k]) * bundle.potentials[k];
    worst = std::max(worst, represents_gradient(space, sub, g, kind).deficit());
  }
  return worst;
}

VerificationReport verify_geodesic(const Space& space, const GeodesicBundle& bundle, CalculusKind kind,
                                   const Config& config) {
  VerificationReport rep;
  rep.suite = "geodesic";
  const CurveSample& c = bundle.curve;
  const int steps = c.steps();
  const double res = resolution(space);
  const double tol_geo = config.tol_geo(res);
  double max_dt = 0.0;
  for (int k = 0; k < steps; ++k) max_dt = std::max(max_dt, c.dt(k));
  const double tol = config.tol(max_dt, res);
  rep.environment["steps"] = std::to_string(steps);
  rep.environment["resolution"] = format_double(res);
  rep.environment["calculus"] = std::string(to_string(kind));

  rep.add("geo.parametrisation", "constant-speed geodesic", geodesic_parametrisation_error(space, bundle), 0.0,
          tol_geo);
  rep.add("geo.potential_optimality", "Hopf-Lax potential is optimal from the interpolant",
          potential_optimality_deficit(space, bundle), 0.0, tol_geo);
  double concavity = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const Field psi = -(1.0 - c.times[k]) * bundle.potentials[k];
    concavity = std::max(concavity, is_c_concave(space, psi).deficit);
  }
  rep.add("geo.c_concave", "interpolated potentials are c-concave", concavity, 0.0, tol_geo);
  rep.add("geo.represents_gradient", "restricted lifting represents the gradient",
          restricted_representation_deficit(space, bundle, kind), 0.0, tol_geo);

  // Continuity equation with the gradient of phi_t, on coordinate and random functions.
  std::vector<Field> battery;
  {
    const GridShape grid = *space.grid();
    const int side = grid.n + 1;
    Field fx(space.size()), fy(space.size());
    for (int x = 0; x < space.size(); ++x) {
      fx[x] = static_cast<double>(grid.dim == 1 ? x : x % side) / grid.n;
      fy[x] = static_cast<double>(grid.dim == 1 ? 0 : x / side) / grid.n;
    }
    battery.push_back(fx);
    if (grid.dim == 2) battery.push_back(fy);
    battery.push_back(fx.cwiseProduct(fx));
    // Random low-frequency field: a test function whose slope stays O(1) as the grid refines.
    std::mt19937_64 rng(7);
    Field r = Field::Zero(space.size());
    for (int j = 1; j <= 3; ++j) {
      const double ax = 2.0 * unit_double(rng) - 1.0, bx = 2.0 * M_PI * unit_double(rng);
      const double ay = 2.0 * unit_double(rng) - 1.0, by = 2.0 * M_PI * unit_double(rng);
      for (int x = 0; x < space.size(); ++x)
        r[x] += (ax * std::cos(j * M_PI * fx[x] + bx) + ay * std::cos(j * M_PI * fy[x] + by)) / j;
    }
    battery.push_back(r);
  }
  double sandwich = 0.0;
  for (const Field& f : battery)
    for (int k = 1; k < steps; ++k) {
      const double central = f.dot(c.measures[k + 1].masses() - c.measures[k - 1].masses()) /
                             (c.times[k + 1] - c.times[k - 1]);
      const Dpm d = dpm(space, kind, f, bundle.potentials[k]);
      const Field& mass = c.measures[k].masses();
      sandwich = std::max({sandwich, d.minus.dot(mass) - central, central - d.plus.dot(mass)});
    }
  rep.add("geo.continuity", "continuity equation driven by the potentials", sandwich, 0.0, tol);

  if (kind == CalculusKind::kQuadratic) {
    const OperatorSample op = extract_operator(space, c, kind, config);
    double gap = 0.0;
    for (int k = 0; k < steps; ++k)
      gap = std::max(gap, std::abs(op.norms[k] - std::sqrt(seminorm_sq(space, kind, bundle.potentials[k],
                                                                        op.mid_density[k]))));
    rep.add("geo.norm_potential", "dual norm carried by the potential", gap, 0.0, tol);
  }
  std::vector<Field> dens;
  for (const ProbMeasure& mu : c.measures) dens.push_back(mu.density());
  rep.note("geo.weak_c1", "second-difference modulus", verify_weak_c1(space, c.times, dens, battery).modulus);
  rep.note("geo.compression", "bounded compression constant", c.compression());
  rep.note("geo.w2", "distance of the endpoints", bundle.w2);
  return rep;
}

}  // namespace mmflow
