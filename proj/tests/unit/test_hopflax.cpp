#include <doctest.h>

#include <random>

#include "mmflow/generators.hpp"
#include "mmflow/hopflax.hpp"

using namespace mmflow;

TEST_SUITE("hopflax") {
  TEST_CASE("constants and t = 0") {
    const Space s = random_euclidean(8, 2, 2);
    CHECK(hopf_lax(s, Field::Constant(8, 1.5), 0.7) == Field::Constant(8, 1.5));
    std::mt19937_64 rng(1);
    Field f(8);
    for (int i = 0; i < 8; ++i) f[i] = unit_double(rng);
    CHECK(hopf_lax(s, f, 0.0) == f);
  }

  TEST_CASE("two-point values") {
    const Space s = two_point(1.0);
    Field f(2);
    f << 0.0, 1.0;
    // Q_1 f(b) = min(1 + 0, 0 + 1/2) = 1/2; Q_1 f(a) = 0.
    const Field q = hopf_lax(s, f, 1.0);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.5);
    for (double t : {0.1, 0.25, 0.5, 0.75, 2.0, 8.0}) CHECK(hopf_lax(s, f, t)[1] == doctest::Approx(std::min(1.0, 0.5 / t)));
    CHECK(hl_fixed_time(s, f) == doctest::Approx(0.5));
  }

  TEST_CASE("two-point kink on the grid {1/4, 1/2, 1}") {
    const Space s = two_point(1.0);
    Field f(2);
    f << 0.0, 1.0;
    const HLReport r = verify_hl(s, f, {0.25, 0.5, 1.0});
    CHECK(r.hj_excess <= 1e-12);
    REQUIRE_FALSE(r.kink_times.empty());
    CHECK(r.kink_times.front() == 0.5);
  }

  TEST_CASE("random instances") {
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back(0.05 * std::pow(1.12, i));
    for (int seed = 0; seed < 8; ++seed) {
      const Space s = random_euclidean(9, 2, 30 + seed);
      std::mt19937_64 rng(seed);
      Field f(9);
      for (int i = 0; i < 9; ++i) f[i] = 2.0 * unit_double(rng) - 1.0;
      const HLReport r = verify_hl(s, f, times);
      CHECK(r.above_f <= 0.0);
      CHECK(r.increase <= 0.0);
      CHECK(r.semigroup <= 1e-12);
      CHECK(r.hj_excess <= 1e-12);
      CHECK(r.fixed_violation == 0.0);
    }
  }

  TEST_CASE("constant f skips the Lipschitz ratio") {
    const Space s = path_grid_1d(4);
    const HLReport r = verify_hl(s, Field::Constant(5, 2.0), {0.1, 0.2, 0.4});
    CHECK(r.lip_ratio == 0.0);
    CHECK(r.hj_excess <= 0.0);
  }
}
