#include <doctest.h>

#include <random>

#include "mmflow/generators.hpp"
#include "mmflow/transport.hpp"

using namespace mmflow;

namespace {

Field vec(std::initializer_list<double> v) {
  Field f(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) f[i++] = x;
  return f;
}

// Brute force over the vertices of a 2 x 2 transportation polytope:
// the plans are parametrised by g00 in [max(0, a0 - b1), min(a0, b0)].
double two_by_two(const Eigen::Matrix2d& c, double a0, double a1, double b0, double b1) {
  double best = 1e300;
  for (double g : {std::max(0.0, a0 - b1), std::min(a0, b0)}) {
    const double plan[4] = {g, a0 - g, b0 - g, a1 - (b0 - g)};
    best = std::min(best, plan[0] * c(0, 0) + plan[1] * c(0, 1) + plan[2] * c(1, 0) + plan[3] * c(1, 1));
  }
  return best;
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("c-transform") {
    const Space s = two_point(1.0);
    CHECK(c_transform(s, Field::Zero(2)) == Field::Zero(2));
    CHECK(c_transform(s, Field::Constant(2, 3.0)) == Field::Constant(2, -3.0));
    CHECK(c_transform(s, vec({0, 0.5})) == vec({0, -0.5}));
  }

  TEST_CASE("c-concavity") {
    const Space s = two_point(1.0);
    CHECK(is_c_concave(s, Field::Zero(2)).ok);
    const CConcavity bad = is_c_concave(s, vec({0, 10}));
    CHECK_FALSE(bad.ok);
    // phi^c = (-9.5, -10), so phi^cc = (min(9.5, 10.5), min(10, 10)).
    CHECK(c_transform(s, c_transform(s, vec({0, 10}))) == vec({9.5, 10}));
    const Space r = random_euclidean(8, 2, 4);
    std::mt19937_64 rng(9);
    Field f(8);
    for (int i = 0; i < 8; ++i) f[i] = unit_double(rng);
    CHECK(is_c_concave(r, c_transform(r, f)).deficit <= 1e-12);
  }

  TEST_CASE("identical measures") {
    const Space s = random_euclidean(7, 2, 1);
    const ProbMeasure mu = ProbMeasure::reference(s);
    const OTResult r = solve_w2(s, mu, mu);
    CHECK(r.w2 == 0.0);
    CHECK((r.coupling.mass - diagonal_coupling(mu).mass).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("single feasible coupling") {
    const Space s = two_point(2.0);
    const OTResult r = solve_w2(s, ProbMeasure::dirac(s, 0), ProbMeasure::dirac(s, 1));
    CHECK(r.w2 == doctest::Approx(2.0));
    CHECK(r.coupling.mass(0, 1) == doctest::Approx(1.0));
    CHECK(r.phi[0] + r.phi_c[1] == doctest::Approx(2.0));
  }

  TEST_CASE("monotone coupling on four points") {
    const Space s = path_grid_1d(3);
    const ProbMeasure mu = ProbMeasure::from_masses(s, vec({0.5, 0.5, 0, 0}));
    const ProbMeasure nu = ProbMeasure::from_masses(s, vec({0, 0, 0.5, 0.5}));
    const OTResult r = solve_w2(s, mu, nu);
    CHECK(r.w2 == doctest::Approx(2.0 / 3));
    CHECK(r.coupling.mass(0, 2) == doctest::Approx(0.5));
    CHECK(r.coupling.mass(1, 3) == doctest::Approx(0.5));
    CHECK(std::abs(r.gap()) <= 1e-9);
    Eigen::Matrix2d c;
    c << 4.0 / 9, 1.0, 1.0 / 9, 4.0 / 9;
    CHECK(r.primal_value == doctest::Approx(two_by_two(c, 0.5, 0.5, 0.5, 0.5)));
  }

  TEST_CASE("random instances: duality and 2x2 brute force") {
    for (int seed = 0; seed < 30; ++seed) {
      const Space s = random_euclidean(2 + seed % 9, 2, seed);
      std::mt19937_64 rng(50 + seed);
      Field a(s.size()), b(s.size());
      for (int i = 0; i < s.size(); ++i) a[i] = unit_double(rng), b[i] = unit_double(rng);
      a /= a.sum();
      b /= b.sum();
      const OTResult r = solve_w2(s, ProbMeasure::from_masses(s, a), ProbMeasure::from_masses(s, b));
      CHECK(std::abs(r.gap()) <= 1e-9);
      CHECK(slackness_residual(s, r) <= 1e-8);
      CHECK(check_coupling(r.coupling, ProbMeasure::from_masses(s, a), ProbMeasure::from_masses(s, b)).max() <= 1e-12);
      CHECK(is_c_concave(s, r.phi, 1e-9).ok);
    }
    for (int seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      Eigen::Matrix2d c;
      c << unit_double(rng), unit_double(rng), unit_double(rng), unit_double(rng);
      const double a0 = 0.1 + 0.8 * unit_double(rng), b0 = 0.1 + 0.8 * unit_double(rng);
      const TransportLP lp = solve_transportation(c, vec({a0, 1 - a0}), vec({b0, 1 - b0}));
      CHECK(lp.cost == doctest::Approx(two_by_two(c, a0, 1 - a0, b0, 1 - b0)).epsilon(1e-12));
    }
  }

  TEST_CASE("degenerate transportation problems terminate") {
    // Equal marginals with many ties in the cost produce degenerate pivots.
    const int n = 12;
    Eigen::MatrixXd c = Eigen::MatrixXd::Ones(n, n);
    for (int i = 0; i < n; ++i) c(i, i) = 0.0;
    const Field a = Field::Constant(n, 1.0 / n);
    const TransportLP lp = solve_transportation(c, a, a);
    CHECK(lp.cost == doctest::Approx(0.0));
  }
}
