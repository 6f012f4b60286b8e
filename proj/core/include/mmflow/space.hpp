#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace mmflow {

/// Real-valued function on the points of a space (potentials, densities,
/// gradient moduli, functional coefficients all share this representation).
using Field = Eigen::VectorXd;

struct Edge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
};

struct Neighbor {
  int point = 0;
  double weight = 0.0;
  double dist = 0.0;
};

/// Regular grid layouts for which ambient linear interpolation is defined.
struct GridShape {
  int dim = 1;  // 1 or 2
  int n = 1;    // cells per side; points per side is n + 1
};

/// Finite metric measure space with an edge structure for the discrete
/// calculus. Immutable once built; every invariant is checked on construction.
class Space {
 public:
  Space(std::vector<std::string> ids, Eigen::MatrixXd dist, Field measure,
        std::vector<Edge> edges);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& dist() const { return dist_; }
  double dist(int x, int y) const { return dist_(x, y); }
  const Field& measure() const { return measure_; }
  double mass(int x) const { return measure_[x]; }
  double total_mass() const { return measure_.sum(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Neighbor>& neighbors(int x) const { return adjacency_[x]; }

  /// Detected grid layout (path_grid_1d / grid_2d geometry), if any.
  const std::optional<GridShape>& grid() const { return grid_; }

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd dist_;
  Field measure_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::optional<GridShape> grid_;
};

/// Validating constructor. Throws Error with kind TriangleViolation (message
/// names the witness triple), AsymmetricDistance, NonpositiveMass,
/// DisconnectedGraph or BadInput.
Space build_space(std::vector<std::string> ids, Eigen::MatrixXd dist, Field measure,
                  std::vector<Edge> edges);

/// Probability measure absolutely continuous w.r.t. the reference measure.
class ProbMeasure {
 public:
  static ProbMeasure from_density(const Space& space, Field density);
  static ProbMeasure from_masses(const Space& space, const Field& masses);
  static ProbMeasure reference(const Space& space);
  static ProbMeasure dirac(const Space& space, int point);

  const Field& density() const { return density_; }
  const Field& masses() const { return masses_; }
  int size() const { return static_cast<int>(density_.size()); }

  /// max_x rho(x); the measure is bounded by compression() times m.
  double compression() const { return density_.maxCoeff(); }
  bool bounded_compression(double c) const { return compression() <= c; }

 private:
  ProbMeasure(Field density, Field masses)
      : density_(std::move(density)), masses_(std::move(masses)) {}

  Field density_;
  Field masses_;
};

/// Transport plan between two measures on the same space.
struct Coupling {
  Eigen::MatrixXd mass;
};

struct MarginalDeficit {
  double row = 0.0;
  double col = 0.0;
  double max() const { return row > col ? row : col; }
};

MarginalDeficit check_coupling(const Coupling& gamma, const ProbMeasure& mu, const ProbMeasure& nu);

Coupling product_coupling(const ProbMeasure& mu, const ProbMeasure& nu);
Coupling diagonal_coupling(const ProbMeasure& mu);

/// All-pairs shortest path lengths through the edge graph, with edge length
/// given by the space distance of the endpoints.
Eigen::MatrixXd shortest_path_closure(const Space& space);

}  // namespace mmflow
