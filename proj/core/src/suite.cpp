#include "mmflow/suite.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mmflow/calculus.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/heatflow.hpp"
#include "mmflow/hopflax.hpp"
#include "mmflow/io.hpp"
#include "mmflow/paths.hpp"
#include "mmflow/transport.hpp"

namespace mmflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field random_field(std::mt19937_64& rng, int n) {
  Field f(n);
  for (int x = 0; x < n; ++x) f[x] = 2.0 * unit_double(rng) - 1.0;
  return f;
}

// Random probability masses; roughly a quarter of the points get no mass.
Field random_masses(std::mt19937_64& rng, int n, bool full_support) {
  Field m(n);
  for (int x = 0; x < n; ++x) {
    const double u = unit_double(rng);
    m[x] = (!full_support && u < 0.25) ? 0.0 : 0.05 + unit_double(rng);
  }
  if (m.sum() == 0.0) m[0] = 1.0;
  return m / m.sum();
}

Field normalised_density(const Space& space, Field rho) { return rho / rho.dot(space.measure()); }

// Gaussian bump on a 1D grid, lifted by `floor`, as a probability density.
Field bump(const Space& space, double center, double width, double floor = 0.0) {
  const int n = space.grid()->n;
  Field rho(space.size());
  for (int x = 0; x < space.size(); ++x) {
    const double s = (static_cast<double>(x) / n - center) / width;
    rho[x] = floor + std::exp(-0.5 * s * s);
  }
  return normalised_density(space, rho);
}

double check_value(const VerificationReport& rep, const std::string& id) {
  for (const Check& c : rep.checks)
    if (c.id == id) return c.value;
  throw Error(ErrorKind::kBadInput, "no check named " + id);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Minimum of sum c g over the vertices of the transportation polytope,
// enumerating every spanning-tree basis of the m x n cell grid.
double vertex_enumeration(const Eigen::MatrixXd& cost, const Field& a, const Field& b) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int cells = m * n;
  const int basis = m + n - 1;
  double best = kInf;
  for (unsigned mask = 0; mask < (1u << cells); ++mask) {
    if (std::popcount(mask) != basis) continue;
    Field ra = a, cb = b;
    std::vector<char> open(cells, 0);
    for (int c = 0; c < cells; ++c) open[c] = (mask >> c) & 1u;
    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(m, n);
    int left = basis;
    bool progress = true;
    while (left > 0 && progress) {
      progress = false;
      for (int i = 0; i < m; ++i) {
        int only = -1, count = 0;
        for (int j = 0; j < n; ++j)
          if (open[i * n + j]) only = j, ++count;
        if (count != 1) continue;
        plan(i, only) = ra[i];
        cb[only] -= ra[i];
        ra[i] = 0.0;
        open[i * n + only] = 0;
        --left;
        progress = true;
      }
      for (int j = 0; j < n; ++j) {
        int only = -1, count = 0;
        for (int i = 0; i < m; ++i)
          if (open[i * n + j]) only = i, ++count;
        if (count != 1) continue;
        plan(only, j) = cb[j];
        ra[only] -= cb[j];
        cb[j] = 0.0;
        open[only * n + j] = 0;
        --left;
        progress = true;
      }
    }
    if (left > 0) continue;  // cycle: not a basis
    if (plan.minCoeff() < -1e-14 || ra.cwiseAbs().maxCoeff() > 1e-14 || cb.cwiseAbs().maxCoeff() > 1e-14) continue;
    best = std::min(best, (plan.array() * cost.array()).sum());
  }
  return best;
}

CriterionResult transport_exactness(const Config& config) {
  CriterionResult r{1, "OT exactness", "", {}};
  r.report.suite = "transport";
  double gap = 0.0, slack = 0.0, marg = 0.0, vertex = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    const int n = std::min(50, 3 + seed);
    const Space space = random_euclidean(n, 2, static_cast<std::uint64_t>(seed));
    std::mt19937_64 rng(1000 + seed);
    const ProbMeasure mu = ProbMeasure::from_masses(space, random_masses(rng, n, false));
    const ProbMeasure nu = ProbMeasure::from_masses(space, random_masses(rng, n, false));
    const OTResult ot = solve_w2(space, mu, nu);
    gap = std::max(gap, std::abs(ot.gap()));
    slack = std::max(slack, slackness_residual(space, ot));
    marg = std::max(marg, check_coupling(ot.coupling, mu, nu).max());

    // Four-point spaces with full supports against the vertex oracle.
    const Space small = random_euclidean(4, 2, static_cast<std::uint64_t>(2000 + seed));
    const Field a = random_masses(rng, 4, true);
    const Field b = random_masses(rng, 4, true);
    const OTResult s = solve_w2(small, ProbMeasure::from_masses(small, a), ProbMeasure::from_masses(small, b));
    const Eigen::MatrixXd cost = small.dist().array().square();
    vertex = std::max(vertex, std::abs(s.primal_value - vertex_enumeration(cost, a, b)));
  }
  r.report.add("ot.gap", "strong duality", gap, 0.0, config.duality_gap);
  r.report.add("ot.slackness", "complementary slackness", slack, 0.0, config.slackness);
  r.report.add("ot.marginals", "coupling marginals", marg, 0.0, config.marginal);
  r.report.add("ot.vertex_enumeration", "agreement with the polytope vertices", vertex, 0.0, config.duality_gap);
  r.summary = "max gap " + fmt(gap) + ", slackness " + fmt(slack) + ", vertex diff " + fmt(vertex);
  return r;
}

CriterionResult hopf_lax_criterion(const Config& config) {
  CriterionResult r{2, "Hopf-Lax", "", {}};
  r.report.suite = "hopflax";
  std::vector<double> times;
  for (int i = 0; i < 64; ++i) times.push_back(0.02 * std::pow(1.1, i));
  double lip = 0.0, hj = -kInf, raw = 0.0, above = 0.0, increase = 0.0, semigroup = -kInf, fixed = 0.0;
  int kinks = 0;
  for (int s = 0; s < 20; ++s) {
    const Space space = random_euclidean(6 + s % 10, 2, static_cast<std::uint64_t>(100 + s));
    std::mt19937_64 rng(200 + s);
    const Field f = random_field(rng, space.size());
    const HLReport h = verify_hl(space, f, times);
    lip = std::max(lip, h.lip_ratio);
    hj = std::max(hj, h.hj_excess);
    raw = std::max(raw, h.hj_raw);
    above = std::max(above, h.above_f);
    increase = std::max(increase, h.increase);
    semigroup = std::max(semigroup, h.semigroup);
    fixed = std::max(fixed, h.fixed_violation);
    kinks += h.kinks;
  }
  r.report.add("hl.lipschitz", "Lip(Q_t f) <= 2 Lip(f)", lip, 2.0, config.lip_slack);
  r.report.add("hl.hj", "Hamilton-Jacobi subsolution outside kinks", hj, 0.0, config.hj_floor);
  r.report.add("hl.below_f", "Q_t f <= f", above, 0.0, config.exact);
  r.report.add("hl.monotone", "t -> Q_t f is nonincreasing", increase, 0.0, config.exact);
  r.report.add("hl.semigroup", "Q_{t+s} f <= Q_t Q_s f", semigroup, 0.0, config.exact);
  r.report.add("hl.fixed_time", "Q_t f = f below the fixed time", fixed, 0.0, config.exact);
  r.report.note("hl.hj_raw", "raw forward-difference residual", raw);
  r.report.note("hl.kinks", "excluded kink pairs", kinks);

  // Two points at distance 1, f = (0, 1): Q_t f(b) = min(1, 1/(2t)), kink at t = 1/2.
  const Space two = two_point(1.0);
  Field f(2);
  f << 0.0, 1.0;
  std::vector<double> grid;
  for (int i = 1; i <= 64; ++i) grid.push_back(i / 16.0);
  double closed = 0.0;
  for (double t : grid) closed = std::max(closed, std::abs(hopf_lax(two, f, t)[1] - std::min(1.0, 0.5 / t)));
  r.report.add("hl.two_point", "two-point closed form", closed, 0.0, 1e-12);
  const HLReport h2 = verify_hl(two, f, grid);
  double kink = kInf;
  for (double t : h2.kink_times) kink = std::min(kink, std::abs(t - 0.5));
  r.report.add("hl.two_point.kink", "kink detected at t = 1/2", kink, 0.0, 1e-12);
  r.report.add("hl.two_point.hj", "two-point subsolution outside kinks", h2.hj_excess, 0.0, config.hj_floor);
  r.summary = "Lip ratio " + fmt(lip) + ", HJ excess " + fmt(hj) + ", closed form " + fmt(closed);
  return r;
}

struct Gaps {
  double action = 0.0;
  double speed = 0.0;
  VerificationReport report;
};

Gaps main_gaps(const Space& space, const CurveSample& curve, const Config& config) {
  Gaps g;
  g.report = verify_main_theorem(space, curve, CalculusKind::kQuadratic, config, 11);
  g.action = std::abs(check_value(g.report, "action.norms") - check_value(g.report, "w2sq"));
  g.speed = check_value(g.report, "speed.norm_gap");
  return g;
}

CurveSample heat_sample(int cells, int steps) {
  const Space space = path_grid_1d(cells);
  const double horizon = 0.01;
  const HeatTrajectory tr = run_heat_flow(space, bump(space, 0.35, 0.1, 0.2), horizon, horizon / steps);
  return heat_curve(space, tr);
}

CurveSample translation_sample(int cells, int steps) {
  // Shift by 1/2 with one cell per step: every interpolant is a grid translate.
  const Space space = path_grid_1d(cells);
  const ProbMeasure mu0 = ProbMeasure::from_density(space, bump(space, 0.25, 0.06));
  const ProbMeasure mu1 = ProbMeasure::from_density(space, bump(space, 0.75, 0.06));
  return displacement_interpolation(space, mu0, mu1, uniform_times(steps)).curve;
}

CriterionResult main_theorem_criterion(const Config& config) {
  CriterionResult r{3, "Main theorem / Kuwada", "", {}};
  r.report.suite = "main";
  std::ostringstream summary;
  for (const char* name : {"heat", "geodesic"}) {
    const bool heat = std::string(name) == "heat";
    const Space coarse = path_grid_1d(32), fine = path_grid_1d(64);
    const Gaps g32 = main_gaps(coarse, heat ? heat_sample(32, 16) : translation_sample(32, 16), config);
    const Gaps g64 = main_gaps(fine, heat ? heat_sample(64, 32) : translation_sample(64, 32), config);
    const std::string p = std::string(name) + ".";
    r.report.merge(g32.report, p + "n32.");
    r.report.merge(g64.report, p + "n64.");
    r.report.add(p + "action_rate", "action gap shrinks by 1.5 under refinement", 1.5 * g64.action, g32.action, 0.0);
    r.report.add(p + "speed_rate", "speed gap shrinks by 1.5 under refinement", 1.5 * g64.speed, g32.speed, 0.0);
    summary << name << ": action gap " << fmt(g32.action) << " -> " << fmt(g64.action) << ", speed gap "
            << fmt(g32.speed) << " -> " << fmt(g64.speed) << "; ";
  }
  r.summary = summary.str();
  return r;
}

CriterionResult dpm_criterion(const Config& config) {
  CriterionResult r{4, "D+- calculus", "", {}};
  r.report.suite = "calculus";
  const Space space = random_euclidean(12, 2, 300);
  const int n = space.size();
  const double cert = std::ldexp(1.0, -config.dpm_max_k);
  for (CalculusKind kind : {CalculusKind::kQuadratic, CalculusKind::kSlope}) {
    std::mt19937_64 rng(kind == CalculusKind::kQuadratic ? 301 : 302);
    double square = 0.0, sign = 0.0, norm = -kInf, conv = -kInf, order = -kInf;
    for (int i = 0; i < 1000; ++i) {
      const Field f = random_field(rng, n), f2 = random_field(rng, n), g = random_field(rng, n);
      const double lambda = unit_double(rng);
      const Field dg = grad_modulus(space, kind, g);
      const Field df = grad_modulus(space, kind, f);
      const Dpm self = dpm(space, kind, g, g, config.dpm_max_k);
      const Dpm d = dpm(space, kind, f, g, config.dpm_max_k);
      const Dpm neg = dpm(space, kind, Field(-f), g, config.dpm_max_k);
      const Dpm d2 = dpm(space, kind, f2, g, config.dpm_max_k);
      const Dpm mix = dpm(space, kind, Field((1.0 - lambda) * f + lambda * f2), g, config.dpm_max_k);
      const Field g2 = dg.cwiseProduct(dg);
      // Allowance of the eps sweep: the last quotient sits eps |Df|^2 / 2 above its limit.
      const Field allow = (kind == CalculusKind::kSlope ? cert : 0.0) * df.cwiseProduct(df);
      const Field sq_allow = (kind == CalculusKind::kSlope ? cert : 0.0) * g2;
      square = std::max({square, ((self.plus - g2).cwiseAbs() - sq_allow).maxCoeff(),
                         ((self.minus - g2).cwiseAbs() - sq_allow).maxCoeff()});
      sign = std::max(sign, (neg.plus + d.minus).cwiseAbs().maxCoeff());
      const Field cap = df.cwiseProduct(dg) + allow;
      norm = std::max({norm, (d.plus.cwiseAbs() - cap).maxCoeff(), (d.minus.cwiseAbs() - cap).maxCoeff()});
      conv = std::max(conv, (mix.plus - (1.0 - lambda) * d.plus - lambda * d2.plus).maxCoeff());
      order = std::max(order, (d.minus - d.plus).maxCoeff());
    }
    const std::string p = std::string(to_string(kind)) + ".";
    r.report.add(p + "squarepm", "D+-g(grad g) = |Dg|^2", square, 0.0, config.identity);
    r.report.add(p + "signpm", "D+(-f)(grad g) = -D-f(grad g)", sign, 0.0, config.identity);
    r.report.add(p + "normpm", "|D+-f(grad g)| <= |Df||Dg|", norm, 0.0, config.exact);
    r.report.add(p + "dpmconv", "f -> D+f(grad g) is convex", conv, 0.0, config.exact + cert);
    r.report.add(p + "order", "D-f(grad g) <= D+f(grad g)", order, 0.0, config.exact);
  }
  // Slope witness: three-point path, g peaked in the middle, f rising at the end.
  const Space line = path_grid_1d(2);
  Field g(3), f(3);
  g << 0.0, 1.0, 0.0;
  f << 0.0, 0.0, 1.0;
  const Dpm w = dpm(line, CalculusKind::kSlope, f, g, config.dpm_max_k);
  const double witness = (w.plus - w.minus).maxCoeff();
  r.report.add("slope.witness", "D+ - D- >= 0.1 somewhere under the slope calculus", 0.1, witness, 0.0);
  r.summary = "slope witness gap " + fmt(witness);
  return r;
}

CriterionResult heat_criterion(const Config& config) {
  CriterionResult r{5, "Heat flow", "", {}};
  r.report.suite = "heat";
  const Space space = path_grid_1d(32);
  const Field rho0 = bump(space, 0.4, 0.08, 0.1);
  const HeatTrajectory tr = run_heat_flow(space, rho0, 0.05, 1.0 / 1024);
  r.report.merge(verify_heat_invariants(space, tr, config));

  // Two points at distance 1: the density difference decays like exp(-4t).
  const Space two = two_point(1.0);
  Field r0(2);
  r0 << 1.6, 0.4;
  const double dt = 0.01;
  const HeatTrajectory t2 = run_heat_flow(two, r0, 1.0, dt);
  double oracle = 0.0;
  for (std::size_t k = 0; k < t2.times.size(); ++k) {
    const double delta = (r0[0] - r0[1]) * std::exp(-4.0 * t2.times[k]);
    oracle = std::max({oracle, std::abs(t2.densities[k][0] - (1.0 + 0.5 * delta)),
                       std::abs(t2.densities[k][1] - (1.0 - 0.5 * delta))});
  }
  r.report.add("heat.two_point", "eigenfunction oracle", oracle, 2.0 * dt * r0.cwiseAbs().maxCoeff(), 0.0);

  // Continuity sandwich at dt and dt/2 on smooth test functions.
  std::vector<Field> battery;
  Field fx(space.size()), fsq(space.size()), fcos(space.size());
  for (int x = 0; x < space.size(); ++x) {
    const double s = static_cast<double>(x) / 32;
    fx[x] = s;
    fsq[x] = s * s;
    fcos[x] = std::cos(M_PI * s);
  }
  battery = {fx, fsq, fcos};
  const double h = 1.0 / 256;
  const HeatContinuity c1 = verify_heat_continuity(space, run_heat_flow(space, rho0, 0.05, h),
                                                   CalculusKind::kQuadratic, battery);
  const HeatContinuity c2 = verify_heat_continuity(space, run_heat_flow(space, rho0, 0.05, h / 2),
                                                   CalculusKind::kQuadratic, battery);
  // O(dt): halving dt must shrink the residual by at least 1.5.
  r.report.add("heat.sandwich.rate", "continuity sandwich is first order in dt", 1.5 * c2.sandwich, c1.sandwich,
               config.tol_floor);
  r.report.note("heat.sandwich.dt", "continuity sandwich at dt", c1.sandwich);
  r.report.note("heat.sandwich.half_dt", "continuity sandwich at dt/2", c2.sandwich);
  r.report.note("heat.sandwich.constant", "sandwich residual over dt", c2.sandwich / (h / 2));
  r.report.add("heat.backward", "backward difference equals the pairing", std::max(c1.one_sided, c2.one_sided), 0.0,
               config.exact);
  r.report.note("heat.chain_form", "pairing against the log-density form", std::max(c1.chain_form, c2.chain_form));
  r.summary = "oracle error " + fmt(oracle) + ", sandwich " + fmt(c1.sandwich) + " -> " + fmt(c2.sandwich);
  return r;
}

CriterionResult geodesic_criterion(const Config& config) {
  CriterionResult r{6, "Geodesics", "", {}};
  r.report.suite = "geodesic";
  double err[2] = {0.0, 0.0};
  const int cells[2] = {32, 64};
  for (int i = 0; i < 2; ++i) {
    const Space space = path_grid_1d(cells[i]);
    const ProbMeasure mu0 = ProbMeasure::from_density(space, bump(space, 0.3, 0.06));
    const ProbMeasure mu1 = ProbMeasure::from_density(space, bump(space, 0.65, 0.09));
    const GeodesicBundle b = displacement_interpolation(space, mu0, mu1, uniform_times(16));
    const VerificationReport rep = verify_geodesic(space, b, CalculusKind::kQuadratic, config);
    r.report.merge(rep, "n" + std::to_string(cells[i]) + ".");
    err[i] = check_value(rep, "geo.parametrisation");
  }
  const double c = err[0] * cells[0];
  r.report.note("geo.constant", "measured c with error c / N at N = 32", c);
  r.report.add("geo.rate", "error at N = 64 within 1.5 c / 64", err[1], 1.5 * c / cells[1], config.tol_floor);
  r.summary = "parametrisation error " + fmt(err[0]) + " -> " + fmt(err[1]) + " (c = " + fmt(c) + ")";
  return r;
}

// Single-path plan from x along one edge that represents the gradient of g,
// or nullopt when no edge at x is steep enough.
std::optional<Plan> representing_plan(const Space& space, CalculusKind kind, const Field& g, int x) {
  const double grad = grad_modulus(space, kind, g)[x];
  const Neighbor* best = nullptr;
  double best_a = 0.0;
  for (const Neighbor& nb : space.neighbors(x)) {
    const double a = (g[nb.point] - g[x]) / nb.dist;
    if (a > best_a) best_a = a, best = &nb;
  }
  if (!best || best_a < grad) return std::nullopt;
  // Speed s solves s^2 - 2 a s + |Dg|^2 = 0 so that the Young inequality is tight.
  const double s = best_a + std::sqrt(std::max(0.0, best_a * best_a - grad * grad));
  Plan plan;
  plan.times = {0.0, best->dist / s};
  plan.paths = {{x, best->point}};
  plan.weights = {1.0};
  return plan;
}

CriterionResult horver_criterion(const Config& config) {
  CriterionResult r{7, "Horizontal-vertical sandwich", "", {}};
  r.report.suite = "horver";
  int triples = 0, vacuous = 0;
  double worst = -kInf, limit_gap = 0.0;
  for (CalculusKind kind : {CalculusKind::kQuadratic, CalculusKind::kSlope}) {
    for (int s = 0; s < 50; ++s) {
      const Space space = random_euclidean(8, 2, static_cast<std::uint64_t>(400 + s));
      std::mt19937_64 rng(static_cast<std::uint64_t>(500 + s + (kind == CalculusKind::kSlope ? 100 : 0)));
      std::optional<Plan> plan;
      Field g;
      while (!plan) {
        g = random_field(rng, space.size());
        for (int x = 0; x < space.size() && !plan; ++x) plan = representing_plan(space, kind, g, x);
      }
      const Field f = random_field(rng, space.size());
      const HorverReport h = verify_horver(space, *plan, f, g, kind);
      ++triples;
      vacuous += h.vacuous;
      worst = std::max({worst, h.lower - h.middle, h.middle - h.upper});
      limit_gap = std::max({limit_gap, h.int_minus - h.middle, h.middle - h.int_plus});
    }
  }
  // The slope witness: the middle point moves to either neighbour with equal weight.
  const Space line = path_grid_1d(2);
  Field g(3), f(3);
  g << 0.0, -1.0, 0.0;
  f << 0.0, 0.0, 1.0;
  Plan plan;
  plan.times = {0.0, 0.25};
  plan.paths = {{1, 0}, {1, 2}};
  plan.weights = {0.5, 0.5};
  const HorverReport w = verify_horver(line, plan, f, g, CalculusKind::kSlope);
  ++triples;
  vacuous += w.vacuous;
  worst = std::max({worst, w.lower - w.middle, w.middle - w.upper});

  r.report.add("horver.sandwich", "first-step sandwich on every triple", worst, 0.0, config.horver);
  r.report.add("horver.vacuous", "every plan represents its gradient", vacuous, 0.0, 0.0);
  r.report.add("horver.count", "at least 100 triples", 100.0, triples, 0.0);
  r.report.note("horver.limit_gap", "distance of the middle term from [int D-, int D+]", limit_gap);
  r.report.note("horver.witness.width", "slope witness bracket width", w.upper - w.lower);
  r.summary = std::to_string(triples) + " triples, worst violation " + fmt(worst);
  return r;
}

CriterionResult structure_criterion(const Config& config) {
  CriterionResult r{8, "Structure", "", {}};
  r.report.suite = "structure";
  const Space space = random_euclidean(12, 2, 600);
  std::mt19937_64 rng(601);
  std::vector<Field> fns;
  for (int i = 0; i < 1002; ++i) fns.push_back(random_field(rng, space.size()));
  const StructureReport q = structure_tests(space, CalculusKind::kQuadratic, fns);
  const StructureReport s = structure_tests(space, CalculusKind::kSlope, fns);
  r.report.add("quadratic.parallelogram", "parallelogram rule", q.parallelogram, 0.0, config.identity);
  r.report.add("quadratic.strict_convexity", "D+ = D-", q.dpm_gap, 0.0, config.identity);
  for (const auto& [name, rep] : {std::pair{"quadratic", q}, std::pair{"slope", s}}) {
    const std::string p = std::string(name) + ".";
    r.report.add(p + "chain_monotone", "chain rule for monotone truncations", rep.chain_affine, 0.0, config.identity);
    r.report.add(p + "chain_upper", "chain rule upper bound", rep.chain_excess, 0.0, config.exact);
    r.report.note(p + "chain_smooth", "smooth chain residual", rep.chain_smooth);
    r.report.note(p + "leibniz", "Leibniz excess", rep.leibniz_excess);
  }
  // Slope witness on the three-point path: f = (1,0,0), g = (0,0,1).
  const Space line = path_grid_1d(2);
  Field f(3), g(3);
  f << 1.0, 0.0, 0.0;
  g << 0.0, 0.0, 1.0;
  auto sq = [&](const Field& h) { return 2.0 * cheeger_energy(line, CalculusKind::kSlope, h); };
  const double witness = std::abs(sq(f + g) + sq(f - g) - 2.0 * sq(f) - 2.0 * sq(g));
  r.report.add("slope.parallelogram_witness", "parallelogram rule fails by at least 0.01", 0.01, witness, 0.0);
  r.report.note("slope.parallelogram", "largest random parallelogram deficit", s.parallelogram);
  r.summary = "quadratic deficit " + fmt(q.parallelogram) + ", slope witness " + fmt(witness);
  return r;
}

bool same_bits(const Field& a, const Field& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

CriterionResult hygiene_criterion(const Config& config) {
  CriterionResult r{9, "Hygiene", "", {}};
  r.report.suite = "hygiene";
  int mismatches = 0;
  auto reparse = [](const json& j) { return json::parse(j.dump()); };

  const Space space = random_euclidean(10, 2, 900);
  const Space back = space_from_json(reparse(space_to_json(space)));
  mismatches += !(back.ids() == space.ids() && same_bits(back.measure(), space.measure()) &&
                  back.dist().cwiseEqual(space.dist()).all() && back.edges().size() == space.edges().size());
  for (std::size_t e = 0; e < space.edges().size() && e < back.edges().size(); ++e)
    mismatches += std::bit_cast<std::uint64_t>(space.edges()[e].weight) !=
                  std::bit_cast<std::uint64_t>(back.edges()[e].weight);

  std::mt19937_64 rng(901);
  const ProbMeasure mu = ProbMeasure::from_masses(space, random_masses(rng, 10, false));
  mismatches += !same_bits(measure_from_json(space, reparse(measure_to_json(mu))).density(), mu.density());

  const Space line = path_grid_1d(8);
  const ProbMeasure a = ProbMeasure::from_density(line, bump(line, 0.3, 0.15));
  const ProbMeasure b = ProbMeasure::from_density(line, bump(line, 0.6, 0.1));
  const GeodesicBundle bundle = displacement_interpolation(line, a, b, uniform_times(4));
  const GeodesicBundle bundle2 = bundle_from_json(line, reparse(bundle_to_json(line, bundle)));
  mismatches += bundle_to_json(line, bundle).dump() != bundle_to_json(line, bundle2).dump();
  for (std::size_t k = 0; k < bundle.curve.measures.size(); ++k)
    mismatches += !same_bits(bundle.curve.measures[k].density(), bundle2.curve.measures[k].density());
  const Plan lifted = lift_curve(line, bundle.curve);
  mismatches += plan_to_json(line, plan_from_json(line, reparse(plan_to_json(line, lifted)))).dump() !=
                plan_to_json(line, lifted).dump();

  const VerificationReport rep = verify_geodesic(line, bundle, CalculusKind::kQuadratic, config);
  const std::string text = report_to_string(rep);
  mismatches += report_to_string(report_from_json(json::parse(text))) != text;
  r.report.add("hygiene.round_trip", "serialisation is bit-exact", mismatches, 0.0, 0.0);

  // Same seed, same bytes.
  const CurveSample curve = bundle.curve;
  const std::string once = report_to_string(verify_main_theorem(line, curve, CalculusKind::kQuadratic, config, 5), false);
  const std::string twice = report_to_string(verify_main_theorem(line, curve, CalculusKind::kQuadratic, config, 5), false);
  r.report.add("hygiene.deterministic", "identical seeds give identical reports", once == twice ? 0.0 : 1.0, 0.0, 0.0);
  r.summary = std::to_string(mismatches) + " round-trip mismatches, reports " +
              (once == twice ? "byte-identical" : "differ");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Config& config, const std::vector<int>& which) {
  using Fn = CriterionResult (*)(const Config&);
  const Fn table[] = {transport_exactness, hopf_lax_criterion, main_theorem_criterion,
                      dpm_criterion,       heat_criterion,     geodesic_criterion,
                      horver_criterion,    structure_criterion, hygiene_criterion};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id) {
    if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult c = table[id - 1](config);
    c.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.report.sort();
    out.push_back(std::move(c));
  }
  return out;
}

VerificationReport merge_criteria(const std::vector<CriterionResult>& results) {
  VerificationReport all;
  all.suite = "all";
  for (const CriterionResult& c : results) {
    all.merge(c.report, "c" + std::to_string(c.id) + ".");
    all.wall_time += c.report.wall_time;
  }
  all.sort();
  return all;
}

}  // namespace mmflow
