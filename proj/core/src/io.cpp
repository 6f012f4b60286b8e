#include "mmflow/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mmflow/error.hpp"

namespace mmflow {
namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::kBadInput, std::string("missing key '") + key + "'");
  return j.at(key);
}

Field to_field(const json& arr) {
  if (!arr.is_array()) throw Error(ErrorKind::kBadInput, "expected an array of numbers");
  Field f(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw Error(ErrorKind::kBadInput, "expected a number");
    f[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return f;
}

json from_field(const Field& f) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < f.size(); ++i) arr.push_back(f[i]);
  return arr;
}

std::vector<double> to_vector(const json& arr) {
  const Field f = to_field(arr);
  return {f.data(), f.data() + f.size()};
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorKind::kBadInput, "point ids must be strings or integers");
}

std::map<std::string, int> id_index(const Space& space) {
  std::map<std::string, int> out;
  for (int x = 0; x < space.size(); ++x) out[space.ids()[x]] = x;
  return out;
}

std::string number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

double number_or_inf(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

}  // namespace

json space_to_json(const Space& space) {
  json j;
  j["points"] = space.ids();
  json dist = json::array();
  for (int x = 0; x < space.size(); ++x) dist.push_back(from_field(space.dist().row(x).transpose()));
  j["dist"] = std::move(dist);
  j["measure"] = from_field(space.measure());
  json edges = json::array();
  for (const Edge& e : space.edges()) edges.push_back(json::array({e.a, e.b, e.weight}));
  j["edges"] = std::move(edges);
  return j;
}

Space space_from_json(const json& j) {
  std::vector<std::string> ids;
  for (const json& v : need(j, "points")) ids.push_back(id_string(v));
  const json& rows = need(j, "dist");
  if (!rows.is_array()) throw Error(ErrorKind::kBadInput, "dist must be a matrix");
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd d(n, n);
  for (int x = 0; x < n; ++x) {
    const Field row = to_field(rows[x]);
    if (row.size() != n) throw Error(ErrorKind::kBadInput, "dist must be square");
    d.row(x) = row.transpose();
  }
  std::vector<Edge> edges;
  for (const json& e : need(j, "edges")) {
    if (!e.is_array() || e.size() != 3) throw Error(ErrorKind::kBadInput, "edges are [i, j, w] triples");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return build_space(std::move(ids), std::move(d), to_field(need(j, "measure")), std::move(edges));
}

json measure_to_json(const ProbMeasure& mu) { return json{{"density", from_field(mu.density())}}; }

ProbMeasure measure_from_json(const Space& space, const json& j) {
  if (j.is_object() && j.contains("density")) return ProbMeasure::from_density(space, to_field(j.at("density")));
  if (j.is_object() && j.contains("mass")) return ProbMeasure::from_masses(space, to_field(j.at("mass")));
  throw Error(ErrorKind::kBadInput, "measure needs 'density' or 'mass'");
}

Field field_from_json(const json& j) {
  if (j.is_array()) return to_field(j);
  return to_field(need(j, "values"));
}

json field_to_json(const Field& f) { return json{{"values", from_field(f)}}; }

json curve_to_json(const CurveSample& curve) {
  json dens = json::array();
  for (const ProbMeasure& mu : curve.measures) dens.push_back(from_field(mu.density()));
  return json{{"times", curve.times}, {"densities", std::move(dens)}};
}

CurveSample curve_from_json(const Space& space, const json& j) {
  std::vector<Field> dens;
  for (const json& row : need(j, "densities")) dens.push_back(to_field(row));
  return make_curve(space, to_vector(need(j, "times")), dens);
}

json plan_to_json(const Space& space, const Plan& plan) {
  json paths = json::array();
  for (const auto& p : plan.paths) {
    json ids = json::array();
    for (int x : p) ids.push_back(space.ids()[x]);
    paths.push_back(std::move(ids));
  }
  return json{{"times", plan.times}, {"paths", std::move(paths)}, {"weights", plan.weights}};
}

Plan plan_from_json(const Space& space, const json& j) {
  const auto index = id_index(space);
  Plan plan;
  plan.times = to_vector(need(j, "times"));
  for (const json& p : need(j, "paths")) {
    std::vector<int> path;
    for (const json& v : p) {
      const auto it = index.find(id_string(v));
      if (it == index.end()) throw Error(ErrorKind::kBadInput, "plan refers to an unknown point");
      path.push_back(it->second);
    }
    plan.paths.push_back(std::move(path));
  }
  plan.weights = to_vector(need(j, "weights"));
  validate_plan(space, plan);
  return plan;
}

json bundle_to_json(const Space& space, const GeodesicBundle& bundle) {
  json j = curve_to_json(bundle.curve);
  j["space"] = space_to_json(space);
  j["phi0"] = from_field(bundle.phi0);
  json pots = json::array();
  for (const Field& p : bundle.potentials) pots.push_back(from_field(p));
  j["potentials"] = std::move(pots);
  j["plan"] = plan_to_json(space, bundle.lifting);
  j["w2"] = bundle.w2;
  return j;
}

GeodesicBundle bundle_from_json(const Space& space, const json& j) {
  GeodesicBundle b{curve_from_json(space, j), to_field(need(j, "phi0")), {}, plan_from_json(space, need(j, "plan")),
                   need(j, "w2").get<double>()};
  for (const json& p : need(j, "potentials")) b.potentials.push_back(to_field(p));
  if (b.potentials.size() != b.curve.times.size())
    throw Error(ErrorKind::kBadInput, "bundle needs one potential per time");
  return b;
}

json ot_result_to_json(const Space& space, const OTResult& r) {
  json coupling = json::array();
  for (int x = 0; x < space.size(); ++x)
    for (int y = 0; y < space.size(); ++y)
      if (r.coupling.mass(x, y) > 0.0) coupling.push_back(json::array({x, y, r.coupling.mass(x, y)}));
  return json{{"w2", r.w2},
              {"primal", r.primal_value},
              {"dual", r.dual_value},
              {"gap", r.gap()},
              {"slackness", slackness_residual(space, r)},
              {"coupling", std::move(coupling)},
              {"phi", from_field(r.phi)},
              {"phi_c", from_field(r.phi_c)}};
}

std::string report_to_string(const VerificationReport& report, bool with_wall_time) {
  std::ostringstream os;
  os << "{\n  \"suite\": " << json(report.suite).dump() << ",\n  \"pass\": " << (report.all_pass() ? "true" : "false")
     << ",\n  \"environment\": " << json(report.environment).dump() << ",\n";
  if (with_wall_time) os << "  \"wall_time\": " << number(report.wall_time) << ",\n";
  os << "  \"checks\": [";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const Check& c = report.checks[i];
    os << (i ? ",\n" : "\n") << "    {\"id\": " << json(c.id).dump() << ", \"anchor\": " << json(c.anchor).dump()
       << ", \"value\": " << number(c.value) << ", \"bound\": " << number(c.bound)
       << ", \"tolerance\": " << number(c.tolerance) << ", \"pass\": " << (c.pass ? "true" : "false") << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.suite = need(j, "suite").get<std::string>();
  if (j.contains("environment")) r.environment = j.at("environment").get<std::map<std::string, std::string>>();
  if (j.contains("wall_time") && !j.at("wall_time").is_null()) r.wall_time = j.at("wall_time").get<double>();
  for (const json& c : need(j, "checks")) {
    Check k;
    k.id = need(c, "id").get<std::string>();
    k.anchor = need(c, "anchor").get<std::string>();
    k.value = c.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at("value").get<double>();
    k.bound = number_or_inf(need(c, "bound"));
    k.tolerance = number_or_inf(need(c, "tolerance"));
    k.pass = need(c, "pass").get<bool>();
    r.checks.push_back(std::move(k));
  }
  return r;
}

Config config_from_json(const json& j, Config c) {
  if (!j.is_object()) throw Error(ErrorKind::kBadInput, "config must be a JSON object");
  const std::map<std::string, double*> reals{
      {"tol_a", &c.tol_a},           {"tol_b", &c.tol_b},         {"tol_floor", &c.tol_floor},
      {"geo_c", &c.geo_c},           {"duality_gap", &c.duality_gap}, {"slackness", &c.slackness},
      {"mass", &c.mass},             {"marginal", &c.marginal},   {"identity", &c.identity},
      {"exact", &c.exact},           {"horver", &c.horver},       {"lip_slack", &c.lip_slack},
      {"hj_floor", &c.hj_floor},     {"c_concave", &c.c_concave}, {"max_principle", &c.max_principle},
      {"young", &c.young}};
  for (const auto& [key, value] : j.items()) {
    if (auto it = reals.find(key); it != reals.end()) {
      *it->second = value.get<double>();
    } else if (key == "dpm_max_k") {
      c.dpm_max_k = value.get<int>();
    } else if (key == "slope_iterations") {
      c.slope_iterations = value.get<int>();
    } else if (key == "max_paths") {
      c.max_paths = value.get<long>();
    } else {
      throw Error(ErrorKind::kBadInput, "unknown config key '" + key + "'");
    }
  }
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kBadInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBadInput, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kBadInput, "cannot write " + path);
  out << text;
}

}  // namespace mmflow
