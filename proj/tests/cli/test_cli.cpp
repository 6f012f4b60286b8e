// Drives the mmflow binary end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("mmflow_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string read(const std::string& name) {
  std::ifstream in(path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(MMFLOW_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" + path("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("gen and w2") {
  REQUIRE(run("gen --spec 'path_grid_1d(3)' --out " + path("grid.json")) == 0);
  write("mu.json", R"({"mass": [0.5, 0.5, 0, 0]})");
  write("nu.json", R"({"mass": [0, 0, 0.5, 0.5]})");
  REQUIRE(run("w2 --space " + path("grid.json") + " --mu " + path("mu.json") + " --nu " + path("nu.json") +
              " --out " + path("ot.json")) == 0);
  const json r = json::parse(read("ot.json"));
  CHECK(r["w2"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(std::abs(r["gap"].get<double>()) <= 1e-9);
}

TEST_CASE("constant curve verifies cleanly") {
  REQUIRE(run("gen --spec 'two_point(1)' --out " + path("two.json")) == 0);
  write("const.json", R"({"times": [0, 0.5, 1], "densities": [[1, 1], [1, 1], [1, 1]]})");
  CHECK(run("verify main --space " + path("two.json") + " --curve " + path("const.json") +
            " --calculus quadratic --out " + path("rep.json")) == 0);
  const json rep = json::parse(read("rep.json"));
  CHECK(rep["pass"].get<bool>());
  // A curve that does not move has zero speed, zero action and zero distance.
  for (const json& c : rep["checks"]) {
    const std::string id = c["id"].get<std::string>();
    if (id.rfind("speed.", 0) == 0 || id.rfind("action.", 0) == 0 || id == "w2sq") CHECK(c["value"].get<double>() == 0.0);
  }
}

TEST_CASE("reports are reproducible") {
  REQUIRE(run("gen --spec 'path_grid_1d(8)' --out " + path("g8.json")) == 0);
  write("a.json", R"({"density": [3, 3, 3, 0, 0, 0, 0, 0, 0]})");
  write("b.json", R"({"density": [0, 0, 0, 0, 0, 0, 3, 3, 3]})");
  REQUIRE(run("geodesic --space " + path("g8.json") + " --mu0 " + path("a.json") + " --mu1 " + path("b.json") +
              " --steps 4 --out " + path("bundle.json")) == 0);
  run("verify geodesic --bundle " + path("bundle.json") + " --out " + path("r1.json"));
  run("verify geodesic --bundle " + path("bundle.json") + " --out " + path("r2.json"));
  json r1 = json::parse(read("r1.json")), r2 = json::parse(read("r2.json"));
  r1.erase("wall_time");
  r2.erase("wall_time");
  CHECK(r1.dump() == r2.dump());

  const json bundle = json::parse(read("bundle.json"));
  write("curve.json", json{{"times", bundle["times"]}, {"densities", bundle["densities"]}}.dump());
  REQUIRE(run("plan lift --space " + path("g8.json") + " --curve " + path("curve.json") + " --out " +
              path("plan.json")) == 0);
  CHECK(run("plan check --space " + path("g8.json") + " --curve " + path("curve.json") + " --plan " +
            path("plan.json") + " --out " + path("pc.json")) == 0);
  CHECK(run("report " + path("r1.json") + " " + path("pc.json") + " --out " + path("sum.csv")) == 0);
  CHECK(read("sum.csv").rfind("suite,id,anchor,value,bound,tolerance,pass\n", 0) == 0);
}

TEST_CASE("CSV producers") {
  REQUIRE(run("gen --spec 'path_grid_1d(3)' --out " + path("grid.json")) == 0);
  write("f.json", "[0, 1, 0, 1]");
  REQUIRE(run("hopflax --space " + path("grid.json") + " --f " + path("f.json") + " --grid 4 --out " +
              path("hl.csv")) == 0);
  CHECK(read("hl.csv").rfind("t,point,Q_tf,lip\n", 0) == 0);
  write("rho.json", R"({"density": [2, 1, 0.5, 0.5]})");
  REQUIRE(run("heat --space " + path("grid.json") + " --rho0 " + path("rho.json") + " --T 0.1 --dt 0.05 --out " +
              path("heat.csv")) == 0);
  CHECK(read("heat.csv").rfind("t,point,rho,laplacian,energy\n", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("w2 --bogus") == 2);
  CHECK(run("nonsense") == 2);
  CHECK(!read("stderr.txt").empty());
  CHECK(run("w2 --space " + path("missing.json") + " --mu x --nu y") == 2);
  write("bad_rho.json", R"({"density": [5, 0, 0, 0]})");
  REQUIRE(run("gen --spec 'path_grid_1d(3)' --out " + path("grid.json")) == 0);
  CHECK(run("heat --space " + path("grid.json") + " --rho0 " + path("bad_rho.json") + " --T 1 --dt 0.1") == 2);
  // A dirac-to-dirac bundle on a coarse grid fails the continuity tolerance.
  write("d0.json", R"({"density": [9, 0, 0, 0, 0, 0, 0, 0, 0]})");
  write("d1.json", R"({"density": [0, 0, 0, 0, 0, 0, 0, 4.5, 4.5]})");
  REQUIRE(run("gen --spec 'path_grid_1d(8)' --out " + path("g8.json")) == 0);
  REQUIRE(run("geodesic --space " + path("g8.json") + " --mu0 " + path("d0.json") + " --mu1 " + path("d1.json") +
              " --steps 4 --out " + path("dd.json")) == 0);
  CHECK(run("verify geodesic --bundle " + path("dd.json")) == 1);
  // A plan parked at one point does not reproduce the curve's marginals.
  write("wrong.json", R"({"times": [0, 0.25, 0.5, 0.75, 1], "paths": [["0", "0", "0", "0", "0"]], "weights": [1]})");
  const json bundle = json::parse(read("dd.json"));
  write("dd_curve.json", json{{"times", bundle["times"]}, {"densities", bundle["densities"]}}.dump());
  CHECK(run("plan check --space " + path("g8.json") + " --curve " + path("dd_curve.json") + " --plan " +
            path("wrong.json")) == 1);
}
