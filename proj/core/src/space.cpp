#include "mmflow/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "mmflow/error.hpp"

namespace mmflow {
namespace {

constexpr double kMassTolerance = 1e-12;

double rel_tol(double scale) { return 1e-12 * std::max(1.0, scale); }

std::optional<GridShape> detect_grid(const Eigen::MatrixXd& d) {
  const int n = static_cast<int>(d.rows());
  if (n < 2) return std::nullopt;
  const double scale = d.maxCoeff();
  // 1D: points i/N on [0,1].
  {
    const int cells = n - 1;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        ok = std::abs(d(i, j) - std::abs(i - j) / static_cast<double>(cells)) <= rel_tol(scale);
    if (ok) return GridShape{1, cells};
  }
  // 2D: (N+1)^2 points, shortest-path (Manhattan) distance with spacing 1/N.
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (side >= 2 && side * side == n) {
    const int cells = side - 1;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        const int manhattan = std::abs(i / side - j / side) + std::abs(i % side - j % side);
        ok = std::abs(d(i, j) - manhattan / static_cast<double>(cells)) <= rel_tol(scale);
      }
    if (ok) return GridShape{2, cells};
  }
  return std::nullopt;
}

}  // namespace

Space::Space(std::vector<std::string> ids, Eigen::MatrixXd dist, Field measure,
             std::vector<Edge> edges)
    : ids_(std::move(ids)), dist_(std::move(dist)), measure_(std::move(measure)),
      edges_(std::move(edges)) {
  const int n = static_cast<int>(ids_.size());
  if (n < 1) throw Error(ErrorKind::kBadInput, "space needs at least one point");
  if (dist_.rows() != n || dist_.cols() != n || measure_.size() != n) {
    std::ostringstream os;
    os << "inconsistent sizes: " << n << " ids, " << dist_.rows() << "x" << dist_.cols()
       << " distances, " << measure_.size() << " masses";
    throw Error(ErrorKind::kBadInput, os.str());
  }
  if (!dist_.allFinite() || !measure_.allFinite())
    throw Error(ErrorKind::kBadInput, "non-finite distance or mass");

  const double scale = n > 1 ? dist_.maxCoeff() : 1.0;
  for (int x = 0; x < n; ++x) {
    if (dist_(x, x) != 0.0) throw Error(ErrorKind::kBadInput, "nonzero self distance");
    for (int y = x + 1; y < n; ++y) {
      if (dist_(x, y) != dist_(y, x)) {
        std::ostringstream os;
        os << "d(" << x << "," << y << ") != d(" << y << "," << x << ")";
        throw Error(ErrorKind::kAsymmetricDistance, os.str());
      }
      if (!(dist_(x, y) > 0.0)) {
        std::ostringstream os;
        os << "d(" << x << "," << y << ") must be positive";
        throw Error(ErrorKind::kBadInput, os.str());
      }
    }
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (dist_(x, z) > dist_(x, y) + dist_(y, z) + rel_tol(scale)) {
          std::ostringstream os;
          os << "d(" << ids_[x] << "," << ids_[z] << ") > d(" << ids_[x] << "," << ids_[y]
             << ") + d(" << ids_[y] << "," << ids_[z] << ")";
          throw Error(ErrorKind::kTriangleViolation, os.str());
        }

  for (int x = 0; x < n; ++x)
    if (!(measure_[x] > 0.0)) {
      std::ostringstream os;
      os << "m(" << ids_[x] << ") = " << measure_[x];
      throw Error(ErrorKind::kNonpositiveMass, os.str());
    }

  adjacency_.assign(n, {});
  for (Edge& e : edges_) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n || e.a == e.b)
      throw Error(ErrorKind::kBadInput, "edge endpoints out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error(ErrorKind::kBadInput, "edge weights must be positive");
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& l, const Edge& r) { return l.a != r.a ? l.a < r.a : l.b < r.b; });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b)
      throw Error(ErrorKind::kBadInput, "duplicate edge");
  for (const Edge& e : edges_) {
    adjacency_[e.a].push_back({e.b, e.weight, dist_(e.a, e.b)});
    adjacency_[e.b].push_back({e.a, e.weight, dist_(e.a, e.b)});
  }

  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : adjacency_[x])
      if (!seen[nb.point]) {
        seen[nb.point] = 1;
        ++reached;
        frontier.push(nb.point);
      }
  }
  if (reached != n) {
    std::ostringstream os;
    os << "edge graph reaches " << reached << " of " << n << " points";
    throw Error(ErrorKind::kDisconnectedGraph, os.str());
  }

  grid_ = detect_grid(dist_);
}

Space build_space(std::vector<std::string> ids, Eigen::MatrixXd dist, Field measure,
                  std::vector<Edge> edges) {
  return Space(std::move(ids), std::move(dist), std::move(measure), std::move(edges));
}

ProbMeasure ProbMeasure::from_density(const Space& space, Field density) {
  if (density.size() != space.size())
    throw Error(ErrorKind::kBadInput, "density size does not match space");
  if (!density.allFinite() || density.minCoeff() < 0.0)
    throw Error(ErrorKind::kBadInput, "density must be finite and nonnegative");
  Field masses = density.cwiseProduct(space.measure());
  const double total = masses.sum();
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass " << total << " differs from 1";
    throw Error(ErrorKind::kBadInput, os.str());
  }
  return ProbMeasure(std::move(density), std::move(masses));
}

ProbMeasure ProbMeasure::from_masses(const Space& space, const Field& masses) {
  if (masses.size() != space.size())
    throw Error(ErrorKind::kBadInput, "mass vector size does not match space");
  return from_density(space, masses.cwiseQuotient(space.measure()));
}

ProbMeasure ProbMeasure::reference(const Space& space) {
  return from_masses(space, space.measure() / space.total_mass());
}

ProbMeasure ProbMeasure::dirac(const Space& space, int point) {
  Field masses = Field::Zero(space.size());
  masses[point] = 1.0;
  return from_masses(space, masses);
}

MarginalDeficit check_coupling(const Coupling& gamma, const ProbMeasure& mu, const ProbMeasure& nu) {
  MarginalDeficit out;
  out.row = (gamma.mass.rowwise().sum() - mu.masses()).cwiseAbs().maxCoeff();
  out.col = (gamma.mass.colwise().sum().transpose() - nu.masses()).cwiseAbs().maxCoeff();
  return out;
}

Coupling product_coupling(const ProbMeasure& mu, const ProbMeasure& nu) {
  return {mu.masses() * nu.masses().transpose()};
}

Coupling diagonal_coupling(const ProbMeasure& mu) {
  return {Eigen::MatrixXd(mu.masses().asDiagonal())};
}

Eigen::MatrixXd shortest_path_closure(const Space& space) {
  const int n = space.size();
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd sp = Eigen::MatrixXd::Constant(n, n, inf);
  for (int x = 0; x < n; ++x) sp(x, x) = 0.0;
  for (const Edge& e : space.edges()) {
    sp(e.a, e.b) = space.dist(e.a, e.b);
    sp(e.b, e.a) = space.dist(e.a, e.b);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sp(i, j) = std::min(sp(i, j), sp(i, k) + sp(k, j));
  return sp;
}

}  // namespace mmflow
