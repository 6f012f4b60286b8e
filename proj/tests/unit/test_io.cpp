#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/io.hpp"

using namespace mmflow;

namespace {

bool same_bits(const Field& a, const Field& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

json reparse(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("space round trip") {
    const Space s = random_euclidean(9, 3, 77);
    const Space t = space_from_json(reparse(space_to_json(s)));
    CHECK(t.ids() == s.ids());
    CHECK(t.dist() == s.dist());
    CHECK(same_bits(t.measure(), s.measure()));
    REQUIRE(t.edges().size() == s.edges().size());
    for (std::size_t e = 0; e < s.edges().size(); ++e) CHECK(t.edges()[e].weight == s.edges()[e].weight);
  }

  TEST_CASE("measures") {
    const Space s = path_grid_1d(3);
    const ProbMeasure mu = measure_from_json(s, json::parse(R"({"mass": [0.1, 0.2, 0.3, 0.4]})"));
    CHECK(mu.masses()[3] == 0.4);
    CHECK(same_bits(measure_from_json(s, reparse(measure_to_json(mu))).density(), mu.density()));
    CHECK_THROWS_AS(measure_from_json(s, json::parse(R"({"weights": [1]})")), Error);
    CHECK_THROWS_AS(measure_from_json(s, json::parse(R"({"mass": [0.5, 0.5]})")), Error);
  }

  TEST_CASE("plan ids") {
    const Space s = path_grid_1d(2);
    const Plan p = plan_from_json(s, json::parse(R"({"times": [0, 1], "paths": [["0", "2"], [1, 1]], "weights": [0.5, 0.5]})"));
    CHECK(p.paths[0] == std::vector<int>{0, 2});
    CHECK(p.paths[1] == std::vector<int>{1, 1});
    CHECK_THROWS_AS(plan_from_json(s, json::parse(R"({"times": [0, 1], "paths": [["0", "9"]], "weights": [1]})")),
                    Error);
  }

  TEST_CASE("report text") {
    VerificationReport r;
    r.suite = "demo";
    r.add("a", "first", 0.1, 0.3, 0.0);
    r.note("b", "second", 1.0 / 3);
    const std::string text = report_to_string(r, false);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"bound\": null") != std::string::npos);
    const VerificationReport back = report_from_json(json::parse(text));
    CHECK(std::isinf(back.checks[1].bound));
    CHECK(back.checks[1].value == 1.0 / 3);
    CHECK(report_to_string(back, false) == text);
  }

  TEST_CASE("config") {
    const Config c = config_from_json(json::parse(R"({"tol_a": 2.5, "dpm_max_k": 30})"));
    CHECK(c.tol_a == 2.5);
    CHECK(c.dpm_max_k == 30);
    CHECK(c.tol_b == Config{}.tol_b);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"tol_c": 1})")), Error);
  }

  TEST_CASE("format") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(2.0 / 3)) == 2.0 / 3);
  }
}
