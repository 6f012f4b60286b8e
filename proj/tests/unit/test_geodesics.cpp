#include <doctest.h>

#include <cmath>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/geodesics.hpp"
#include "mmflow/transport.hpp"

using namespace mmflow;

namespace {

Field bump(const Space& s, double c, double w) {
  const int n = s.grid()->n;
  Field r(s.size());
  for (int x = 0; x < s.size(); ++x) r[x] = std::exp(-0.5 * std::pow((double(x) / n - c) / w, 2));
  return r / r.dot(s.measure());
}

}  // namespace

TEST_SUITE("geodesics") {
  TEST_CASE("dirac to dirac through a grid point") {
    const Space s = path_grid_1d(4);
    const GeodesicBundle g =
        displacement_interpolation(s, ProbMeasure::dirac(s, 0), ProbMeasure::dirac(s, 4), {0.0, 0.5, 1.0});
    CHECK(g.curve.measures[1].masses()[2] == doctest::Approx(1.0));
    CHECK(w2_distance(s, g.curve.measures[0], g.curve.measures[1]) == doctest::Approx(0.5));
  }

  TEST_CASE("dirac to dirac between grid points") {
    const Space s = path_grid_1d(5);
    const GeodesicBundle g =
        displacement_interpolation(s, ProbMeasure::dirac(s, 0), ProbMeasure::dirac(s, 5), {0.0, 0.5, 1.0});
    const Field& m = g.curve.measures[1].masses();
    CHECK(m[2] == doctest::Approx(0.5));
    CHECK(m[3] == doctest::Approx(0.5));
    // W2^2 = (0.16 + 0.36) / 2, against half the endpoint distance.
    const double w = w2_distance(s, g.curve.measures[0], g.curve.measures[1]);
    CHECK(w == doctest::Approx(std::sqrt(0.26)));
    CHECK(std::abs(w - 0.5) <= 0.1);
  }

  TEST_CASE("constant geodesic") {
    const Space s = path_grid_1d(16);
    const ProbMeasure mu = ProbMeasure::from_density(s, bump(s, 0.5, 0.1));
    const GeodesicBundle g = displacement_interpolation(s, mu, mu, uniform_times(4));
    for (const ProbMeasure& m : g.curve.measures) CHECK((m.masses() - mu.masses()).cwiseAbs().maxCoeff() < 1e-15);
    const VerificationReport rep = verify_geodesic(s, g, CalculusKind::kQuadratic);
    CHECK(rep.all_pass());
    for (const Check& c : rep.checks)
      if (c.id == "geo.parametrisation" || c.id == "geo.potential_optimality" || c.id == "geo.c_concave")
        CHECK(c.value == 0.0);
  }

  TEST_CASE("potential flow") {
    const Space s = path_grid_1d(6);
    for (const Field& p : potential_flow(s, Field::Zero(7), uniform_times(3))) CHECK(p == Field::Zero(7));

    // Two points, delta_a to delta_b: phi0 = (0, -1/2), phi0^c = (0, 1/2), and
    // -Q_s(-phi0^c) = (0, 1/2) for every s <= 1.
    const Space two = two_point(1.0);
    const OTResult ot = solve_w2(two, ProbMeasure::dirac(two, 0), ProbMeasure::dirac(two, 1));
    CHECK(ot.phi[0] == 0.0);
    CHECK(ot.phi[1] == doctest::Approx(-0.5));
    for (const Field& p : potential_flow(two, ot.phi, {0.0, 0.25, 0.5, 1.0})) {
      CHECK(p[0] == doctest::Approx(0.0));
      CHECK(p[1] == doctest::Approx(0.5));
    }
    Field bad(2);
    bad << 0.0, 10.0;
    CHECK_THROWS_AS(potential_flow(two, bad, {0.0, 1.0}), Error);
  }

  TEST_CASE("unsupported space") {
    const Space c = cycle(5);
    try {
      displacement_interpolation(c, ProbMeasure::dirac(c, 0), ProbMeasure::dirac(c, 2), {0.0, 1.0});
      FAIL("cycle accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUnsupportedSpace);
    }
  }

  TEST_CASE("reversal symmetry") {
    const Space s = path_grid_1d(24);
    const ProbMeasure a = ProbMeasure::from_density(s, bump(s, 0.3, 0.07));
    const ProbMeasure b = ProbMeasure::from_density(s, bump(s, 0.7, 0.1));
    const GeodesicBundle fwd = displacement_interpolation(s, a, b, uniform_times(8));
    const GeodesicBundle bwd = displacement_interpolation(s, b, a, uniform_times(8));
    for (int k = 0; k <= 8; ++k)
      CHECK((fwd.curve.measures[k].masses() - bwd.curve.measures[8 - k].masses()).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("2D grid bundle") {
    const Space s = grid_2d(6);
    const ProbMeasure a = ProbMeasure::dirac(s, 0);
    const ProbMeasure b = ProbMeasure::dirac(s, s.size() - 1);
    const GeodesicBundle g = displacement_interpolation(s, a, b, uniform_times(2));
    // The midpoint of the diagonal is the grid point (3, 3).
    CHECK(g.curve.measures[1].masses()[3 * 7 + 3] == doctest::Approx(1.0));
    const VerificationReport rep = verify_geodesic(s, g, CalculusKind::kSlope);
    // Diracs are far from the smooth regime, so only the exact checks apply.
    for (const Check& c : rep.checks)
      if (c.id == "geo.parametrisation" || c.id == "geo.potential_optimality" || c.id == "geo.c_concave")
        CHECK(c.value <= 1e-12);
  }

  TEST_CASE("refinement") {
    double err[2];
    int i = 0;
    for (int n : {32, 64}) {
      const Space s = path_grid_1d(n);
      const GeodesicBundle g = displacement_interpolation(s, ProbMeasure::from_density(s, bump(s, 0.3, 0.06)),
                                                          ProbMeasure::from_density(s, bump(s, 0.65, 0.09)),
                                                          uniform_times(16));
      err[i++] = geodesic_parametrisation_error(s, g);
      CHECK(potential_optimality_deficit(s, g) <= 1.0 / n);
      CHECK(restricted_representation_deficit(s, g, CalculusKind::kQuadratic) <= 1.0 / n);
    }
    CHECK(err[0] <= 1.0 / 32);
    CHECK(err[1] < err[0]);
  }
}
