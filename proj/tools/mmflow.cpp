// mmflow: command-line front end for the verification library.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmflow/calculus.hpp"
#include "mmflow/curves.hpp"
#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/heatflow.hpp"
#include "mmflow/hopflax.hpp"
#include "mmflow/io.hpp"
#include "mmflow/paths.hpp"
#include "mmflow/suite.hpp"
#include "mmflow/transport.hpp"

namespace {

using namespace mmflow;

constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kSolver = 3;

// Writes to the file, or to stdout when no path was given.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Config load_config(const std::string& path) {
  return path.empty() ? Config{} : config_from_json(read_json_file(path));
}

int finish(const VerificationReport& rep, const std::string& out) {
  emit(out, report_to_string(rep));
  if (!rep.all_pass()) {
    for (const Check& c : rep.checks)
      if (!c.pass)
        std::cerr << "failed " << c.id << ": value " << format_double(c.value) << " > bound "
                  << format_double(c.bound) << " + " << format_double(c.tolerance) << "\n";
  }
  return rep.all_pass() ? 0 : kFailed;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Options {
  std::string spec, out, space, mu, nu, f, rho0, mu0, mu1, curve, plan, bundle, config;
  std::string calculus = "quadratic";
  std::uint64_t seed = 0;
  int grid = 64;
  double tmax = 1.0;
  double horizon = 1.0;
  double dt = 0.00390625;
  int steps = 16;
  std::vector<std::string> reports;
};

int cmd_gen(const Options& o) {
  emit(o.out, dump(space_to_json(generate(parse_generator_spec(o.spec, o.seed)))));
  return 0;
}

int cmd_w2(const Options& o) {
  const Space space = space_from_json(read_json_file(o.space));
  const ProbMeasure mu = measure_from_json(space, read_json_file(o.mu));
  const ProbMeasure nu = measure_from_json(space, read_json_file(o.nu));
  emit(o.out, dump(ot_result_to_json(space, solve_w2(space, mu, nu))));
  return 0;
}

int cmd_hopflax(const Options& o) {
  if (o.grid < 1) throw Error(ErrorKind::kBadInput, "--grid must be positive");
  const Space space = space_from_json(read_json_file(o.space));
  const Field f = field_from_json(read_json_file(o.f));
  if (f.size() != space.size()) throw Error(ErrorKind::kBadInput, "f size does not match space");
  std::vector<double> times{0.0};
  for (int i = 1; i <= o.grid; ++i) times.push_back(o.tmax * i / o.grid);
  const HLTrajectory tr = hl_trajectory(space, f, times);
  std::ostringstream os;
  os << "t,point,Q_tf,lip\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (int x = 0; x < space.size(); ++x)
      os << format_double(tr.times[k]) << "," << csv_escape(space.ids()[x]) << "," << format_double(tr.values[k][x])
         << "," << format_double(tr.lips[k][x]) << "\n";
  emit(o.out, os.str());
  return 0;
}

int cmd_heat(const Options& o) {
  const Space space = space_from_json(read_json_file(o.space));
  const json rho = read_json_file(o.rho0);
  const Field rho0 = rho.is_array() ? field_from_json(rho) : measure_from_json(space, rho).density();
  const HeatTrajectory tr = run_heat_flow(space, rho0, o.horizon, o.dt);
  std::ostringstream os;
  os << "t,point,rho,laplacian,energy\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (int x = 0; x < space.size(); ++x)
      os << format_double(tr.times[k]) << "," << csv_escape(space.ids()[x]) << ","
         << format_double(tr.densities[k][x]) << "," << format_double(tr.laplacians[k][x]) << ","
         << format_double(tr.energies[k]) << "\n";
  emit(o.out, os.str());
  return 0;
}

int cmd_geodesic(const Options& o) {
  const Space space = space_from_json(read_json_file(o.space));
  const ProbMeasure mu0 = measure_from_json(space, read_json_file(o.mu0));
  const ProbMeasure mu1 = measure_from_json(space, read_json_file(o.mu1));
  const GeodesicBundle b = displacement_interpolation(space, mu0, mu1, uniform_times(o.steps));
  emit(o.out, dump(bundle_to_json(space, b)));
  return 0;
}

int cmd_plan(const std::string& action, const Options& o) {
  const Space space = space_from_json(read_json_file(o.space));
  const CurveSample curve = curve_from_json(space, read_json_file(o.curve));
  if (action == "lift") {
    emit(o.out, dump(plan_to_json(space, lift_curve(space, curve, load_config(o.config).max_paths))));
    return 0;
  }
  if (o.plan.empty()) throw Error(ErrorKind::kBadInput, "plan check needs --plan");
  const Config config = load_config(o.config);
  const Plan plan = plan_from_json(space, read_json_file(o.plan));
  if (plan.times.size() != curve.times.size()) throw Error(ErrorKind::kBadInput, "plan and curve grids differ");
  VerificationReport rep;
  rep.suite = "plan";
  double marg = 0.0;
  for (int k = 0; k <= plan.steps(); ++k)
    marg = std::max(marg, (marginal(space, plan, k) - curve.measures[k].masses()).cwiseAbs().maxCoeff());
  const TestPlanCheck tp = is_test_plan(space, plan, curve.compression());
  const SpeedSample sp = metric_speed(space, curve);
  rep.add("plan.marginals", "time marginals reproduce the curve", marg, 0.0, config.marginal);
  rep.add("plan.compression", "bounded compression", tp.max_density, curve.compression(),
          config.exact * std::max(1.0, curve.compression()));
  rep.add("plan.action", "kinetic action matches the metric action", std::abs(tp.action - sp.action), 0.0,
          config.exact * std::max(1.0, sp.action));
  return finish(rep, o.out);
}

int cmd_verify(const std::string& what, const Options& o) {
  const Config config = load_config(o.config);
  if (what == "all") {
    const auto results = run_acceptance(config);
    for (const CriterionResult& c : results)
      std::cerr << "criterion " << c.id << " " << (c.pass() ? "PASS" : "FAIL") << ": " << c.title << " ("
                << c.summary << ")\n";
    return finish(merge_criteria(results), o.out);
  }
  const CalculusKind kind = parse_calculus_kind(o.calculus);
  if (what == "geodesic") {
    const json j = read_json_file(o.bundle);
    const Space space = o.space.empty() ? space_from_json(j.at("space")) : space_from_json(read_json_file(o.space));
    return finish(verify_geodesic(space, bundle_from_json(space, j), kind, config), o.out);
  }
  const Space space = space_from_json(read_json_file(o.space));
  const CurveSample curve = curve_from_json(space, read_json_file(o.curve));
  if (what == "main") return finish(verify_main_theorem(space, curve, kind, config, o.seed), o.out);
  if (what == "bb")
    return finish(benamou_brenier(space, curve.measures.front(), curve.measures.back(), {curve}, kind, config),
                  o.out);
  if (o.nu.empty()) throw Error(ErrorKind::kBadInput, "verify derw2 needs --nu");
  const ProbMeasure nu = measure_from_json(space, read_json_file(o.nu));
  return finish(w2_derivative(space, curve, nu, kind, config), o.out);
}

int cmd_report(const Options& o) {
  std::ostringstream os;
  os << "suite,id,anchor,value,bound,tolerance,pass\n";
  bool ok = true;
  for (const std::string& path : o.reports) {
    const VerificationReport rep = report_from_json(read_json_file(path));
    for (const Check& c : rep.checks) {
      os << csv_escape(rep.suite) << "," << csv_escape(c.id) << "," << csv_escape(c.anchor) << ","
         << format_double(c.value) << "," << format_double(c.bound) << "," << format_double(c.tolerance) << ","
         << (c.pass ? "true" : "false") << "\n";
      ok = ok && c.pass;
    }
  }
  emit(o.out, os.str());
  return ok ? 0 : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of calculus on finite metric measure spaces"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a space");
  gen->add_option("--spec", o.spec, "two_point(L), path_grid_1d(N), grid_2d(N), cycle(N), random_euclidean(n,d)")
      ->required();
  gen->add_option("--out", o.out, "Output space JSON");
  gen->add_option("--seed", o.seed, "Seed for random families");

  auto* w2 = app.add_subcommand("w2", "Solve optimal transport for the quadratic cost");
  w2->add_option("--space", o.space)->required();
  w2->add_option("--mu", o.mu)->required();
  w2->add_option("--nu", o.nu)->required();
  w2->add_option("--out", o.out);

  auto* hl = app.add_subcommand("hopflax", "Hopf-Lax trajectory as CSV");
  hl->add_option("--space", o.space)->required();
  hl->add_option("--f", o.f)->required();
  hl->add_option("--grid", o.grid, "Number of time steps on (0, tmax]");
  hl->add_option("--tmax", o.tmax, "Last time");
  hl->add_option("--out", o.out);

  auto* heat = app.add_subcommand("heat", "Implicit Euler heat flow as CSV");
  heat->add_option("--space", o.space)->required();
  heat->add_option("--rho0", o.rho0)->required();
  heat->add_option("--T", o.horizon);
  heat->add_option("--dt", o.dt);
  heat->add_option("--out", o.out);

  auto* geo = app.add_subcommand("geodesic", "Displacement interpolation bundle");
  geo->add_option("--space", o.space)->required();
  geo->add_option("--mu0", o.mu0)->required();
  geo->add_option("--mu1", o.mu1)->required();
  geo->add_option("--steps", o.steps);
  geo->add_option("--out", o.out);

  std::string plan_action;
  auto* plan = app.add_subcommand("plan", "Lift a curve to a plan, or check a plan against a curve");
  plan->add_option("action", plan_action)->required()->check(CLI::IsMember({"lift", "check"}));
  plan->add_option("--space", o.space)->required();
  plan->add_option("--curve", o.curve)->required();
  plan->add_option("--plan", o.plan, "Plan to check");
  plan->add_option("--config", o.config);
  plan->add_option("--out", o.out);

  std::string verify_what;
  auto* verify = app.add_subcommand("verify", "Run a verifier and write its report");
  verify->add_option("what", verify_what)->required()->check(CLI::IsMember({"main", "bb", "derw2", "geodesic", "all"}));
  verify->add_option("--space", o.space);
  verify->add_option("--curve", o.curve);
  verify->add_option("--nu", o.nu);
  verify->add_option("--bundle", o.bundle);
  verify->add_option("--calculus", o.calculus)->check(CLI::IsMember({"slope", "quadratic"}));
  verify->add_option("--config", o.config);
  verify->add_option("--seed", o.seed);
  verify->add_option("--out", o.out);

  auto* report = app.add_subcommand("report", "Merge report files into a CSV summary");
  report->add_option("reports", o.reports)->required();
  report->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*w2) return cmd_w2(o);
    if (*hl) return cmd_hopflax(o);
    if (*heat) return cmd_heat(o);
    if (*geo) return cmd_geodesic(o);
    if (*plan) return cmd_plan(plan_action, o);
    if (*verify) {
      if (verify_what == "geodesic" ? o.bundle.empty() : (verify_what != "all" && (o.space.empty() || o.curve.empty()))) {
        std::cerr << "verify " << verify_what << ": missing input files\n" << verify->help();
        return kUsage;
      }
      return cmd_verify(verify_what, o);
    }
    if (*report) return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << "mmflow: " << e.what() << "\n";
    return is_solver_error(e.kind()) ? kSolver : kUsage;
  } catch (const json::exception& e) {
    std::cerr << "mmflow: malformed input: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
