#include "mmflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "mmflow/error.hpp"

namespace mmflow {
namespace {

struct Cell {
  int i = 0;
  int j = 0;
};

bool cell_less(const Cell& l, const Cell& r) { return l.i != r.i ? l.i < r.i : l.j < r.j; }

enum class Pricing { kDantzig, kBland };

// Transportation simplex on a spanning-tree basis of m + n - 1 cells.
class Simplex {
 public:
  Simplex(const Eigen::MatrixXd& cost, const Field& a, const Field& b)
      : c_(cost), a_(a), b_(b), m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())) {
    const double cmax = c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0;
    price_tol_ = 1e-11 * std::max(1.0, cmax);
  }

  // Returns false if the pivot cap was hit.
  bool run(Pricing start, int cap) {
    northwest_corner();
    Pricing rule = start;
    int degenerate_run = 0;
    const int switch_after = 2 * (m_ + n_);
    for (pivots_ = 0; pivots_ < cap; ++pivots_) {
      potentials();
      Cell enter;
      if (!entering(rule, enter)) return true;
      const double theta = pivot(enter, rule);
      if (theta <= 1e-300) {
        if (++degenerate_run > switch_after) rule = Pricing::kBland;
      } else {
        degenerate_run = 0;
        rule = start;
      }
    }
    return false;
  }

  TransportLP result() {
    potentials();
    TransportLP out;
    out.plan = Eigen::MatrixXd::Zero(m_, n_);
    for (std::size_t k = 0; k < basis_.size(); ++k)
      out.plan(basis_[k].i, basis_[k].j) = std::max(0.0, flow_[k]);
    out.u = u_;
    out.v = v_;
    out.cost = (out.plan.array() * c_.array()).sum();
    out.pivots = pivots_;
    return out;
  }

 private:
  void northwest_corner() {
    basis_.clear();
    flow_.clear();
    int i = 0;
    int j = 0;
    double ra = a_[0];
    double rb = b_[0];
    while (true) {
      if (i == m_ - 1 && j == n_ - 1) {
        basis_.push_back({i, j});
        flow_.push_back(std::max(0.0, std::min(ra, rb)));
        break;
      }
      if ((ra <= rb && i < m_ - 1) || j == n_ - 1) {
        basis_.push_back({i, j});
        flow_.push_back(ra);
        rb = std::max(0.0, rb - ra);
        ++i;
        ra = a_[i];
      } else {
        basis_.push_back({i, j});
        flow_.push_back(rb);
        ra = std::max(0.0, ra - rb);
        ++j;
        rb = b_[j];
      }
    }
  }

  // Node ids: rows 0..m-1, columns m..m+n-1. adj_[node] holds basis indices.
  void build_tree() {
    adj_.assign(m_ + n_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj_[basis_[k].i].push_back(static_cast<int>(k));
      adj_[m_ + basis_[k].j].push_back(static_cast<int>(k));
    }
  }

  int other(int node, int k) const {
    return node < m_ ? m_ + basis_[k].j : basis_[k].i;
  }

  void potentials() {
    build_tree();
    u_ = Field::Zero(m_);
    v_ = Field::Zero(n_);
    std::vector<char> seen(m_ + n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const int node = q.front();
      q.pop();
      for (int k : adj_[node]) {
        const int nx = other(node, k);
        if (seen[nx]) continue;
        seen[nx] = 1;
        const Cell& cell = basis_[k];
        if (nx >= m_) v_[cell.j] = c_(cell.i, cell.j) - u_[cell.i];
        else u_[cell.i] = c_(cell.i, cell.j) - v_[cell.j];
        q.push(nx);
      }
    }
    for (char s : seen)
      if (!s) throw Error(ErrorKind::kDegenerateBasis, "basis is not a spanning tree");
  }

  bool entering(Pricing rule, Cell& out) const {
    double best = -price_tol_;
    bool found = false;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) {
        const double r = c_(i, j) - u_[i] - v_[j];
        if (r < best) {
          out = {i, j};
          found = true;
          if (rule == Pricing::kBland) return true;
          best = r;
        }
      }
    return found;
  }

  double pivot(const Cell& enter, Pricing rule) {
    // Tree path from row enter.i to column enter.j.
    const int src = enter.i;
    const int dst = m_ + enter.j;
    std::vector<int> via(m_ + n_, -1);
    std::vector<char> seen(m_ + n_, 0);
    std::queue<int> q;
    q.push(src);
    seen[src] = 1;
    while (!q.empty() && !seen[dst]) {
      const int node = q.front();
      q.pop();
      for (int k : adj_[node]) {
        const int nx = other(node, k);
        if (seen[nx]) continue;
        seen[nx] = 1;
        via[nx] = k;
        q.push(nx);
      }
    }
    if (!seen[dst]) throw Error(ErrorKind::kDegenerateBasis, "no cycle for entering cell");
    std::vector<int> path;  // basis indices from dst back to src
    for (int node = dst; node != src;) {
      const int k = via[node];
      path.push_back(k);
      node = other(node, k);
    }
    // path[0] touches column enter.j and loses flow; signs alternate.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const int k = path[t];
      const double f = flow_[k];
      const bool better =
          leave < 0 || f < theta ||
          (f == theta && rule == Pricing::kBland && cell_less(basis_[k], basis_[leave]));
      if (better) {
        theta = f;
        leave = k;
      }
    }
    theta = std::max(0.0, theta);
    for (std::size_t t = 0; t < path.size(); ++t) {
      const int k = path[t];
      flow_[k] = t % 2 == 0 ? std::max(0.0, flow_[k] - theta) : flow_[k] + theta;
    }
    basis_[leave] = enter;
    flow_[leave] = theta;
    return theta;
  }

  const Eigen::MatrixXd& c_;
  const Field& a_;
  const Field& b_;
  int m_;
  int n_;
  double price_tol_ = 0.0;
  std::vector<Cell> basis_;
  std::vector<double> flow_;
  std::vector<std::vector<int>> adj_;
  Field u_;
  Field v_;
  int pivots_ = 0;
};

}  // namespace

double OTResult::gap() const { return std::abs(0.5 * primal_value - dual_value); }

TransportLP solve_transportation(const Eigen::MatrixXd& cost, const Field& a, const Field& b) {
  if (a.size() == 0 || b.size() == 0 || cost.rows() != a.size() || cost.cols() != b.size())
    throw Error(ErrorKind::kInfeasible, "transportation problem has inconsistent shape");
  if (!(a.minCoeff() > 0.0) || !(b.minCoeff() > 0.0))
    throw Error(ErrorKind::kInfeasible, "marginals must be positive on the support");
  if (std::abs(a.sum() - b.sum()) > 1e-10 * std::max(1.0, a.sum()))
    throw Error(ErrorKind::kInfeasible, "marginal totals differ");
  const int size = static_cast<int>(a.size() + b.size());
  const int cap = 50 * size * size + 1000;
  {
    Simplex sx(cost, a, b);
    if (sx.run(Pricing::kDantzig, cap)) return sx.result();
  }
  Simplex sx(cost, a, b);
  if (sx.run(Pricing::kBland, cap)) return sx.result();
  throw Error(ErrorKind::kDegenerateBasis, "pivot limit reached under Bland's rule");
}

Field c_transform(const Space& space, const Field& phi) {
  return c_transform_over(space, phi, std::vector<char>(space.size(), 1));
}

Field c_transform_over(const Space& space, const Field& phi, const std::vector<char>& mask) {
  const int n = space.size();
  Field out = Field::Constant(n, std::numeric_limits<double>::infinity());
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (mask[x]) {
        const double d = space.dist(x, y);
        out[y] = std::min(out[y], 0.5 * d * d - phi[x]);
      }
  return out;
}

CConcavity is_c_concave(const Space& space, const Field& phi, double tol) {
  const Field cc = c_transform(space, c_transform(space, phi));
  CConcavity out;
  out.deficit = (cc - phi).cwiseAbs().maxCoeff();
  out.ok = out.deficit <= tol;
  return out;
}

OTResult solve_w2(const Space& space, const ProbMeasure& mu, const ProbMeasure& nu) {
  const int n = space.size();
  if (mu.size() != n || nu.size() != n)
    throw Error(ErrorKind::kBadInput, "measure size does not match space");
  std::vector<int> rows, cols;
  std::vector<char> col_mask(n, 0);
  for (int x = 0; x < n; ++x) {
    if (mu.masses()[x] > 0.0) rows.push_back(x);
    if (nu.masses()[x] > 0.0) {
      cols.push_back(x);
      col_mask[x] = 1;
    }
  }
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(cols.size());
  Eigen::MatrixXd cost(r, c);
  Field a(r), b(c);
  for (int i = 0; i < r; ++i) a[i] = mu.masses()[rows[i]];
  for (int j = 0; j < c; ++j) b[j] = nu.masses()[cols[j]];
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const double d = space.dist(rows[i], cols[j]);
      cost(i, j) = 0.5 * d * d;
    }
  const TransportLP lp = solve_transportation(cost, a, b);

  OTResult out;
  out.pivots = lp.pivots;
  out.coupling.mass = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.coupling.mass(rows[i], cols[j]) = lp.plan(i, j);

  // phi is the c-transform of the column potential over supp(nu); phi_c its
  // exact c-transform. Both steps can only raise the dual objective.
  Field psi = Field::Zero(n);
  for (int j = 0; j < c; ++j) psi[cols[j]] = lp.v[j];
  out.phi = c_transform_over(space, psi, col_mask);
  const double shift = out.phi[rows.front()];
  out.phi.array() -= shift;
  out.phi_c = c_transform(space, out.phi);

  out.primal_value = (out.coupling.mass.array() * space.dist().array().square()).sum();
  out.dual_value = out.phi.dot(mu.masses()) + out.phi_c.dot(nu.masses());
  out.w2 = std::sqrt(std::max(0.0, out.primal_value));
  return out;
}

double w2_distance(const Space& space, const ProbMeasure& mu, const ProbMeasure& nu) {
  return solve_w2(space, mu, nu).w2;
}

double slackness_residual(const Space& space, const OTResult& r) {
  double worst = 0.0;
  const int n = space.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (r.coupling.mass(x, y) > 0.0) {
        const double d = space.dist(x, y);
        worst = std::max(worst, std::abs(r.phi[x] + r.phi_c[y] - 0.5 * d * d));
      }
  return worst;
}

}  // namespace mmflow
