#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "mmflow/space.hpp"

namespace mmflow {

enum class GeneratorKind { kTwoPoint, kPathGrid1d, kGrid2d, kCycle, kRandomEuclidean };

/// Parameters of a generated space. `size` is N for the graph families and n
/// (number of points) for random_euclidean; `length` is only read by
/// two_point.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kPathGrid1d;
  int size = 1;
  int dim = 2;
  double length = 1.0;
  std::uint64_t seed = 0;
};

/// Parses "two_point(2.0)", "path_grid_1d(4)", "grid_2d(3)", "cycle(5)",
/// "random_euclidean(10,2)". A colon form ("cycle:5", "random_euclidean:10,2")
/// is accepted as well. The seed is supplied separately.
GeneratorSpec parse_generator_spec(std::string_view text, std::uint64_t seed = 0);

std::string to_string(const GeneratorSpec& spec);

/// Builds the space. Reference measure is uniform with total mass 1.
///
/// Edge weights: two_point uses w = 1/d^2, so the quadratic gradient modulus
/// equals the difference slope at both points. Every other family uses
/// w_xy = (m(x) + m(y)) / (2 d(x,y)^2), under which sum_x |Df|^2(x) m(x)
/// is the usual finite-difference Dirichlet integral.
///
/// random_euclidean draws coordinates in [0,1)^dim from std::mt19937_64
/// seeded with `seed`, converting each raw 64-bit draw u to (u >> 11) * 2^-53,
/// point-major. Edges are the Euclidean minimum spanning tree (Prim, lowest
/// index first on ties) united with each point's 3 nearest neighbours.
Space generate(const GeneratorSpec& spec);

Space two_point(double length);
Space path_grid_1d(int cells);
Space grid_2d(int cells);
Space cycle(int points);
Space random_euclidean(int points, int dim, std::uint64_t seed);

/// Uniform double in [0,1) from a raw 64-bit engine draw, using the same
/// documented conversion as random_euclidean.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mmflow
