#include <doctest.h>

#include <cmath>

#include "mmflow/curves.hpp"
#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/paths.hpp"

using namespace mmflow;

namespace {

Field vec(std::initializer_list<double> v) {
  Field f(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) f[i++] = x;
  return f;
}

// Mass moving from a to b on two points at unit distance over two steps.
CurveSample two_point_transfer(const Space& s) {
  return make_curve(s, uniform_times(2), {vec({2, 0}), vec({1, 1}), vec({0, 2})});
}

CurveSample constant_curve(const Space& s, int steps) {
  std::vector<Field> dens(steps + 1, Field::Ones(s.size()));
  return make_curve(s, uniform_times(steps), dens);
}

}  // namespace

TEST_SUITE("curves") {
  TEST_CASE("time grids") {
    CHECK(uniform_times(4) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    const Space s = two_point(1.0);
    CHECK_THROWS_AS(make_curve(s, {0.0, 0.5}, {vec({1, 1}), vec({1, 1})}), Error);
    CHECK_THROWS_AS(make_curve(s, {0.0, 1.0}, {vec({1, 1})}), Error);
    CHECK_THROWS_AS(make_curve(s, {0.0, 1.0}, {vec({1, 1}), vec({1, 2})}), Error);
  }

  TEST_CASE("constant curve") {
    const Space s = two_point(1.0);
    const CurveSample c = constant_curve(s, 3);
    const SpeedSample sp = metric_speed(s, c);
    for (double v : sp.speed) CHECK(v == 0.0);
    const OperatorSample op = extract_operator(s, c, CalculusKind::kQuadratic);
    for (double n : op.norms) CHECK(n == 0.0);
    const VerificationReport rep = verify_main_theorem(s, c, CalculusKind::kQuadratic);
    CHECK(rep.all_pass());
    for (const Check& k : rep.checks)
      if (k.bound == 0.0 && k.id.find("kuwada") == std::string::npos) CHECK(k.value == 0.0);
    CHECK(w2_derivative(s, c, ProbMeasure::reference(s), CalculusKind::kQuadratic).all_pass());
  }

  TEST_CASE("two-point transfer speeds and norms") {
    const Space s = two_point(1.0);
    const CurveSample c = two_point_transfer(s);
    const SpeedSample sp = metric_speed(s, c);
    // Half the mass moves distance 1 per half step: W2^2 = 1/2, speed sqrt(2).
    CHECK(sp.w2[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(sp.speed[0] == doctest::Approx(std::sqrt(2.0)));
    const OperatorSample op = extract_operator(s, c, CalculusKind::kQuadratic);
    // l = (-1, 1); A at the mid density (3/2, 1/2) has edge coefficient 1, so N^2 = 1.
    CHECK(op.ell[0].isApprox(vec({-1, 1})));
    CHECK(op.norms[0] == doctest::Approx(1.0));
    for (const Field& l : op.ell) CHECK(std::abs(l.sum()) < 1e-15);
  }

  TEST_CASE("Benamou-Brenier") {
    const Space s = two_point(1.0);
    const ProbMeasure a = ProbMeasure::from_density(s, vec({2, 0}));
    const ProbMeasure b = ProbMeasure::from_density(s, vec({0, 2}));
    const CurveSample wasteful =
        make_curve(s, uniform_times(3), {vec({2, 0}), vec({0, 2}), vec({2, 0}), vec({0, 2})});
    const VerificationReport rep = benamou_brenier(s, a, b, {wasteful}, CalculusKind::kQuadratic);
    CHECK(rep.all_pass());
    for (const Check& k : rep.checks)
      if (k.id == "bb.gap") CHECK(k.value > 0.0);
    CHECK_THROWS_AS(benamou_brenier(s, a, a, {wasteful}, CalculusKind::kQuadratic), Error);
    CHECK_THROWS_AS(benamou_brenier(s, a, b, {wasteful}, CalculusKind::kSlope), Error);
  }
}

TEST_SUITE("paths") {
  TEST_CASE("constant lift") {
    const Space s = path_grid_1d(3);
    const Plan p = lift_curve(s, constant_curve(s, 2));
    for (const auto& path : p.paths) CHECK(std::all_of(path.begin(), path.end(), [&](int x) { return x == path[0]; }));
    CHECK(kinetic_action(s, p) == 0.0);
  }

  TEST_CASE("single transfer") {
    const Space s = two_point(1.0);
    const CurveSample c = make_curve(s, uniform_times(1), {vec({2, 0}), vec({0, 2})});
    const Plan p = lift_curve(s, c);
    REQUIRE(p.paths.size() == 1);
    CHECK(p.paths[0] == std::vector<int>{0, 1});
    CHECK(kinetic_action(s, p) == doctest::Approx(1.0));
  }

  TEST_CASE("geodesic lift carries the metric action") {
    const Space s = path_grid_1d(8);
    const ProbMeasure a = ProbMeasure::from_density(s, vec({3, 3, 3, 0, 0, 0, 0, 0, 0}));
    const ProbMeasure b = ProbMeasure::from_density(s, vec({0, 0, 0, 0, 0, 0, 3, 3, 3}));
    const GeodesicBundle g = displacement_interpolation(s, a, b, uniform_times(4));
    const Plan p = lift_curve(s, g.curve);
    CHECK(kinetic_action(s, p) == doctest::Approx(metric_speed(s, g.curve).action).epsilon(1e-12));
    for (int k = 0; k <= p.steps(); ++k)
      CHECK((marginal(s, p, k) - g.curve.measures[k].masses()).cwiseAbs().maxCoeff() < 1e-12);
    const TestPlanCheck t = is_test_plan(s, p, g.curve.compression());
    CHECK(t.ok);
  }

  TEST_CASE("compression witness") {
    const Space s = path_grid_1d(3);
    Plan p;
    p.times = {0.0, 1.0};
    p.paths = {{1, 1}};
    p.weights = {1.0};
    const TestPlanCheck t = is_test_plan(s, p, 2.0);
    CHECK_FALSE(t.ok);
    CHECK(t.max_density == doctest::Approx(4.0));
    CHECK(t.witness_point == 1);
    CHECK(is_test_plan(s, p, 4.0).ok);
  }

  TEST_CASE("representing a gradient") {
    const Space s = two_point(1.0);
    const Field g = vec({0, 1});
    Plan p;
    p.times = {0.0, 1.0};
    p.paths = {{0, 1}};
    p.weights = {1.0};
    GradientRepresentation r = represents_gradient(s, p, g, CalculusKind::kQuadratic);
    CHECK(r.a == doctest::Approx(1.0));
    CHECK(r.b == doctest::Approx(1.0));
    p.times = {0.0, 0.5};
    r = represents_gradient(s, p, g, CalculusKind::kQuadratic);
    CHECK(r.a == doctest::Approx(2.0));
    CHECK(r.b == doctest::Approx(2.5));
    CHECK(r.deficit() == doctest::Approx(0.5));
  }

  TEST_CASE("sandwich") {
    const Space line = path_grid_1d(2);
    Plan p;
    p.times = {0.0, 0.25};
    p.paths = {{1, 0}, {1, 2}};
    p.weights = {0.5, 0.5};
    const Field g = vec({0, -1, 0});
    const HorverReport w = verify_horver(line, p, vec({0, 0, 1}), g, CalculusKind::kSlope);
    CHECK_FALSE(w.vacuous);
    CHECK(w.middle == doctest::Approx(2.0));
    CHECK(w.lower == doctest::Approx(0.0));
    CHECK(w.upper == doctest::Approx(4.0));
    CHECK(w.holds(1e-8));

    // f = g: both bounds and the middle collapse to |Dg|^2 at the start.
    const HorverReport self = verify_horver(line, p, g, g, CalculusKind::kSlope);
    CHECK(self.middle == doctest::Approx(4.0));
    CHECK(self.lower == doctest::Approx(4.0));
    CHECK(self.upper == doctest::Approx(4.0));

    const HorverReport flat = verify_horver(line, p, Field::Ones(3), g, CalculusKind::kSlope);
    CHECK(flat.middle == 0.0);
    CHECK(flat.int_minus == 0.0);
    CHECK(flat.int_plus == 0.0);
  }

  TEST_CASE("restriction and normalisation") {
    const Space s = path_grid_1d(8);
    const ProbMeasure a = ProbMeasure::from_density(s, vec({3, 3, 3, 0, 0, 0, 0, 0, 0}));
    const ProbMeasure b = ProbMeasure::from_density(s, vec({0, 0, 0, 0, 0, 0, 3, 3, 3}));
    const GeodesicBundle g = displacement_interpolation(s, a, b, uniform_times(4));
    const Plan full = restrict_plan(g.lifting, 0, 4);
    CHECK(full.paths == g.lifting.paths);
    CHECK(full.weights == g.lifting.weights);
    const Plan tail = restrict_plan(g.lifting, 2, 4);
    CHECK(tail.times == std::vector<double>{0.0, 0.5, 1.0});
    for (int j = 0; j <= 2; ++j)
      CHECK((marginal(s, tail, j) - g.curve.measures[2 + j].masses()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(restrict_plan(g.lifting, 3, 2), Error);

    Plan dup;
    dup.times = {0.0, 1.0};
    dup.paths = {{1, 2}, {0, 0}, {1, 2}};
    dup.weights = {0.25, 0.5, 0.25};
    normalize_plan(dup);
    CHECK(dup.paths == std::vector<std::vector<int>>{{0, 0}, {1, 2}});
    CHECK(dup.weights == std::vector<double>{0.5, 0.5});
  }
}
