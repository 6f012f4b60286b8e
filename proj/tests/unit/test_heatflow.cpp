#include <doctest.h>

#include <cmath>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/heatflow.hpp"

using namespace mmflow;

namespace {

Field vec(std::initializer_list<double> v) {
  Field f(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) f[i++] = x;
  return f;
}

}  // namespace

TEST_SUITE("heatflow") {
  TEST_CASE("laplacian") {
    const Space s = two_point(1.0);
    CHECK(laplacian(s, vec({0, 1})) == vec({2, -2}));
    CHECK(laplacian(s, Field::Constant(2, 3.0)) == Field::Zero(2));
  }

  TEST_CASE("cycle harmonic is an eigenvector") {
    const int n = 12;
    const Space s = cycle(n);
    Field f(n);
    for (int x = 0; x < n; ++x) f[x] = std::cos(2 * M_PI * x / n);
    // Unit edges, w = m: Delta is the plain second difference, eigenvalue 2 cos(2 pi / n) - 2.
    const double lambda = 2.0 - 2.0 * std::cos(2 * M_PI / n);
    CHECK((laplacian(s, f) + lambda * f).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("stationary and conservative") {
    const Space s = path_grid_1d(8);
    const HeatTrajectory flat = run_heat_flow(s, Field::Ones(9), 0.5, 0.05);
    for (const Field& rho : flat.densities) CHECK((rho - Field::Ones(9)).cwiseAbs().maxCoeff() < 1e-14);
    Field r0 = Field::Zero(9);
    r0[2] = 9.0;
    const HeatTrajectory tr = run_heat_flow(s, r0, 0.5, 0.01);
    for (const Field& rho : tr.densities) CHECK(std::abs(rho.dot(s.measure()) - 1.0) < 1e-12);
    const VerificationReport rep = verify_heat_invariants(s, tr);
    CHECK(rep.all_pass());
  }

  TEST_CASE("two-point oracle") {
    // rho0 = (1 + d, 1 - d): the difference decays like exp(-4t).
    const Space s = two_point(1.0);
    const double d = 0.5;
    for (double dt : {0.02, 0.01}) {
      const HeatTrajectory tr = run_heat_flow(s, vec({1 + d, 1 - d}), 1.0, dt);
      double err = 0.0;
      for (std::size_t k = 0; k < tr.times.size(); ++k)
        err = std::max(err, std::abs(tr.densities[k][0] - (1 + d * std::exp(-4 * tr.times[k]))));
      CHECK(err <= 2 * dt * (1 + d));
    }
  }

  TEST_CASE("continuity on two points") {
    const Space s = two_point(1.0);
    const std::vector<Field> battery{vec({0, 1}), vec({1, -1})};
    const double c1 = verify_heat_continuity(s, run_heat_flow(s, vec({1.5, 0.5}), 1.0, 0.02),
                                             CalculusKind::kQuadratic, battery).sandwich;
    const double c2 = verify_heat_continuity(s, run_heat_flow(s, vec({1.5, 0.5}), 1.0, 0.01),
                                             CalculusKind::kQuadratic, battery).sandwich;
    CHECK(c2 <= 0.6 * c1);
    const HeatContinuity c = verify_heat_continuity(s, run_heat_flow(s, vec({1.5, 0.5}), 1.0, 0.01),
                                                    CalculusKind::kQuadratic, battery);
    CHECK(c.one_sided <= 1e-12);
    CHECK_THROWS_AS(verify_heat_continuity(s, run_heat_flow(s, vec({2, 0}), 1.0, 0.1), CalculusKind::kQuadratic,
                                           battery),
                    Error);
  }

  TEST_CASE("weak C1 modulus") {
    // int f rho_t dm = const + d (f_a - f_b) exp(-4t) / 2; second derivative 8 d (f_a - f_b) exp(-4t).
    const Space s = two_point(1.0);
    const double d = 0.5;
    const HeatTrajectory tr = run_heat_flow(s, vec({1 + d, 1 - d}), 1.0, 0.01);
    const Field f = vec({1, -1});
    const WeakC1 w = verify_weak_c1(s, tr.times, tr.densities, {f});
    CHECK(w.modulus <= 16 * d * f.cwiseAbs().maxCoeff());
    CHECK(verify_weak_c1(s, tr.times, tr.densities, {Field::Ones(2)}).modulus < 1e-9);
  }

  TEST_CASE("bad initial data") {
    const Space s = two_point(1.0);
    CHECK_THROWS_AS(run_heat_flow(s, vec({1, 1, 1}), 1.0, 0.1), Error);
    CHECK_THROWS_AS(run_heat_flow(s, vec({2.5, -0.5}), 1.0, 0.1), Error);
    CHECK_THROWS_AS(run_heat_flow(s, vec({1, 0.5}), 1.0, 0.1), Error);
  }
}
