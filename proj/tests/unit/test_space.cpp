#include <doctest.h>

#include "mmflow/error.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/space.hpp"

using namespace mmflow;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kBadInput;
}

}  // namespace

TEST_SUITE("space") {
  TEST_CASE("smallest valid space") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 1, 0;
    Field m(2);
    m << 0.5, 0.5;
    const Space s = build_space({"a", "b"}, d, m, {{0, 1, 1.0}});
    CHECK(s.size() == 2);
    CHECK(s.total_mass() == doctest::Approx(1.0));
  }

  TEST_CASE("triangle violation names the witness") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 3, 1, 0, 1, 3, 1, 0;
    const Field m = Field::Constant(3, 1.0 / 3);
    try {
      build_space({"a", "b", "c"}, d, m, {{0, 1, 1.0}, {1, 2, 1.0}});
      FAIL("accepted a triangle violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kTriangleViolation);
      const std::string what = e.what();
      CHECK(what.find('a') != std::string::npos);
      CHECK(what.find('c') != std::string::npos);
    }
  }

  TEST_CASE("invalid inputs") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 2, 0;
    Field m(2);
    m << 0.5, 0.5;
    CHECK(kind_of([&] { build_space({"a", "b"}, d, m, {{0, 1, 1.0}}); }) == ErrorKind::kAsymmetricDistance);
    d << 0, 1, 1, 0;
    Field bad(2);
    bad << 0.5, 0.0;
    CHECK(kind_of([&] { build_space({"a", "b"}, d, bad, {{0, 1, 1.0}}); }) == ErrorKind::kNonpositiveMass);
    CHECK(kind_of([&] { build_space({"a", "b"}, d, m, {}); }) == ErrorKind::kDisconnectedGraph);
  }

  TEST_CASE("generators") {
    const Space two = two_point(2.0);
    CHECK(two.dist(0, 1) == 2.0);
    CHECK(two.dist(1, 0) == 2.0);
    CHECK(two.edges().size() == 1);

    const Space line = path_grid_1d(4);
    REQUIRE(line.size() == 5);
    CHECK(line.edges().size() == 4);
    for (int i = 0; i < 5; ++i) CHECK(line.dist(0, i) == doctest::Approx(i / 4.0));
    REQUIRE(line.grid());
    CHECK(line.grid()->dim == 1);
    CHECK(line.grid()->n == 4);

    const Space sq = grid_2d(3);
    CHECK(sq.size() == 16);
    REQUIRE(sq.grid());
    CHECK(sq.grid()->dim == 2);

    // Unit cycle of three points: every pair is one edge apart.
    const Space c3 = cycle(3);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) CHECK(c3.dist(x, y) == (x == y ? 0.0 : 1.0));
    CHECK((shortest_path_closure(cycle(7)) - cycle(7).dist()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("random_euclidean is reproducible") {
    const Space a = random_euclidean(12, 2, 42);
    const Space b = random_euclidean(12, 2, 42);
    const Space c = random_euclidean(12, 2, 43);
    CHECK(a.dist() == b.dist());
    CHECK(a.dist() != c.dist());
    CHECK(a.ids().front() == "0");
    CHECK(a.edges().size() >= 11u);  // spanning tree at least
  }

  TEST_CASE("spec parsing") {
    CHECK(parse_generator_spec("cycle(5)").kind == GeneratorKind::kCycle);
    CHECK(parse_generator_spec("cycle:5").size == 5);
    const GeneratorSpec r = parse_generator_spec("random_euclidean(10,3)", 9);
    CHECK(r.size == 10);
    CHECK(r.dim == 3);
    CHECK(r.seed == 9);
    CHECK(parse_generator_spec("two_point(2.5)").length == 2.5);
    CHECK(kind_of([] { parse_generator_spec("torus(3)"); }) == ErrorKind::kBadSpec);
  }

  TEST_CASE("couplings") {
    const Space s = path_grid_1d(3);
    Field a(4), b(4);
    a << 0.1, 0.2, 0.3, 0.4;
    b << 0.4, 0.3, 0.2, 0.1;
    const ProbMeasure mu = ProbMeasure::from_masses(s, a);
    const ProbMeasure nu = ProbMeasure::from_masses(s, b);
    CHECK(check_coupling(product_coupling(mu, nu), mu, nu).max() < 1e-15);
    CHECK(check_coupling(diagonal_coupling(mu), mu, mu).max() < 1e-15);
    // Diagonal of mu has column sums a, so the column deficit is max |a - b| = 0.3.
    CHECK(check_coupling(diagonal_coupling(mu), mu, nu).col == doctest::Approx(0.3));
  }
}
