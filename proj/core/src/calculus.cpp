#include "mmflow/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "mmflow/error.hpp"

namespace mmflow {
namespace {

constexpr double kMonotoneTolerance = 1e-9;

double slope_sq_at(const Space& space, const Field& f, int x) {
  double best = 0.0;
  for (const Neighbor& nb : space.neighbors(x)) {
    const double s = (f[nb.point] - f[x]) / nb.dist;
    best = std::max(best, s * s);
  }
  return best;
}

double quadratic_sq_at(const Space& space, const Field& f, int x) {
  double acc = 0.0;
  for (const Neighbor& nb : space.neighbors(x)) {
    const double df = f[nb.point] - f[x];
    acc += nb.weight * df * df;
  }
  return acc / (2.0 * space.mass(x));
}

// Slope-kind D-+ at one point from the eps sweep.
std::pair<double, double> slope_dpm_at(const Space& space, const Field& f, const Field& g, int x,
                                       int max_k) {
  const auto& nbs = space.neighbors(x);
  if (nbs.empty()) return {0.0, 0.0};
  std::vector<double> a(nbs.size()), b(nbs.size()), gap(nbs.size());
  double top = 0.0;
  for (std::size_t i = 0; i < nbs.size(); ++i) {
    a[i] = (g[nbs[i].point] - g[x]) / nbs[i].dist;
    b[i] = (f[nbs[i].point] - f[x]) / nbs[i].dist;
    top = std::max(top, a[i] * a[i]);
  }
  const double snap = 8.0 * std::numeric_limits<double>::epsilon() * top;
  for (std::size_t i = 0; i < nbs.size(); ++i) {
    gap[i] = a[i] * a[i] - top;
    if (std::abs(gap[i]) <= snap) gap[i] = 0.0;
  }
  auto quotient = [&](double eps) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nbs.size(); ++i)
      best = std::max(best, gap[i] + eps * b[i] * (2.0 * a[i] + eps * b[i]));
    return best / (2.0 * eps);
  };
  double plus = 0.0;
  double minus = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double qp = quotient(eps);
    const double qm = quotient(-eps);
    if (k > 0) {
      const double scale = kMonotoneTolerance * std::max({1.0, std::abs(qp), std::abs(qm)});
      if (qp > plus + scale || qm < minus - scale) {
        std::ostringstream os;
        os << "difference quotient not monotone at point " << space.ids()[x] << ", k = " << k;
        throw Error(ErrorKind::kNonMonotoneQuotient, os.str());
      }
    }
    plus = qp;
    minus = qm;
  }
  if (minus > plus) minus = plus;  // certificate: q(-eps) <= q(eps) by convexity
  return {minus, plus};
}

struct Components {
  std::vector<int> label;
  int count = 0;
};

Components positive_components(const Space& space, const Field& density) {
  const int n = space.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const Edge& e : space.edges())
    if (density[e.a] + density[e.b] > 0.0) parent[find(e.a)] = find(e.b);
  Components c;
  c.label.assign(n, -1);
  std::vector<int> root_label(n, -1);
  for (int x = 0; x < n; ++x) {
    const int r = find(x);
    if (root_label[r] < 0) root_label[r] = c.count++;
    c.label[x] = root_label[r];
  }
  return c;
}

double ray_value(double action, double energy) {
  if (action == 0.0) return 0.0;  // -f is as good as f
  if (energy <= 0.0) return std::numeric_limits<double>::infinity();
  return action * action / (2.0 * energy);
}

DualNorm quadratic_dual_norm(const Space& space, const Field& ell, const Field& density) {
  const int n = space.size();
  const Eigen::MatrixXd a = dirichlet_matrix(space, density);
  const Components comps = positive_components(space, density);
  const double scale = 1e-9 * std::max(1.0, ell.cwiseAbs().sum());
  Field phi = Field::Zero(n);
  for (int c = 0; c < comps.count; ++c) {
    std::vector<int> nodes;
    double sum = 0.0;
    for (int x = 0; x < n; ++x)
      if (comps.label[x] == c) {
        nodes.push_back(x);
        sum += ell[x];
      }
    if (std::abs(sum) > scale) {
      std::ostringstream os;
      os.precision(17);
      os << "functional has mass " << sum << " on a component of " << nodes.size()
         << " point(s) separated by zero density";
      throw Error(ErrorKind::kSingularForm, os.str());
    }
    const int s = static_cast<int>(nodes.size());
    if (s == 1) continue;
    // Ground the first node of the component.
    Eigen::MatrixXd sub(s - 1, s - 1);
    Field rhs(s - 1);
    for (int i = 1; i < s; ++i) {
      rhs[i - 1] = ell[nodes[i]];
      for (int j = 1; j < s; ++j) sub(i - 1, j - 1) = a(nodes[i], nodes[j]);
    }
    Field sol;
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() == Eigen::Success) {
      sol = llt.solve(rhs);
    } else {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
      if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::kSolverFailure, "Dirichlet solve failed");
      sol = ldlt.solve(rhs);
    }
    for (int i = 1; i < s; ++i) phi[nodes[i]] = sol[i - 1];
  }
  DualNorm out;
  out.norm = std::sqrt(std::max(0.0, ell.dot(phi)));
  out.phi = std::move(phi);
  return out;
}

DualNorm slope_dual_norm(const Space& space, const Field& ell, const Field& density, int iterations) {
  const int n = space.size();
  const Field rm = density.cwiseProduct(space.measure());
  auto energy = [&](const Field& f) { return grad_modulus_sq(space, CalculusKind::kSlope, f).dot(rm); };

  Field f;
  try {
    f = quadratic_dual_norm(space, ell, density).phi.value();
  } catch (const Error&) {
    f = ell;
  }
  double best = ray_value(ell.dot(f), energy(f));
  const double step0 = std::max(1e-12, f.cwiseAbs().maxCoeff());
  for (int k = 1; k <= iterations && std::isfinite(best); ++k) {
    // Supergradient of l.f - 1/2 sum rho m max_y ((f(y)-f(x))/d)^2.
    Field grad = ell;
    for (int x = 0; x < n; ++x) {
      int arg = -1;
      double top = -1.0;
      for (const Neighbor& nb : space.neighbors(x)) {
        const double s = (f[nb.point] - f[x]) / nb.dist;
        if (s * s > top) {
          top = s * s;
          arg = nb.point;
        }
      }
      if (arg < 0) continue;
      const double s = (f[arg] - f[x]) / space.dist(x, arg);
      const double c = rm[x] * s / space.dist(x, arg);
      grad[arg] -= c;
      grad[x] += c;
    }
    grad.array() -= grad.mean();
    const double gn = grad.norm();
    if (!(gn > 0.0)) break;
    f += (step0 / std::sqrt(static_cast<double>(k))) * grad / gn;
    best = std::max(best, ray_value(ell.dot(f), energy(f)));
  }
  DualNorm out;
  out.norm = std::sqrt(2.0 * best);
  out.approximate = true;
  return out;
}

}  // namespace

std::string_view to_string(CalculusKind kind) {
  return kind == CalculusKind::kSlope ? "slope" : "quadratic";
}

CalculusKind parse_calculus_kind(std::string_view text) {
  if (text == "slope") return CalculusKind::kSlope;
  if (text == "quadratic") return CalculusKind::kQuadratic;
  throw Error(ErrorKind::kBadInput, "unknown calculus '" + std::string(text) + "'");
}

Field grad_modulus_sq(const Space& space, CalculusKind kind, const Field& f) {
  Field out(space.size());
  for (int x = 0; x < space.size(); ++x)
    out[x] = kind == CalculusKind::kSlope ? slope_sq_at(space, f, x) : quadratic_sq_at(space, f, x);
  return out;
}

Field grad_modulus(const Space& space, CalculusKind kind, const Field& f) {
  if (kind == CalculusKind::kSlope) return local_slope(space, f);
  return grad_modulus_sq(space, kind, f).cwiseSqrt();
}

Field local_slope(const Space& space, const Field& g) {
  Field out = Field::Zero(space.size());
  for (int x = 0; x < space.size(); ++x)
    for (const Neighbor& nb : space.neighbors(x))
      out[x] = std::max(out[x], std::abs(g[nb.point] - g[x]) / nb.dist);
  return out;
}

double global_lipschitz(const Space& space, const Field& g) {
  double best = 0.0;
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y)
      best = std::max(best, std::abs(g[y] - g[x]) / space.dist(x, y));
  return best;
}

double seminorm_sq(const Space& space, CalculusKind kind, const Field& f, const Field& density) {
  return grad_modulus_sq(space, kind, f).dot(density.cwiseProduct(space.measure()));
}

double seminorm(const Space& space, CalculusKind kind, const Field& f, const ProbMeasure& mu) {
  return std::sqrt(seminorm_sq(space, kind, f, mu.density()));
}

double cheeger_energy(const Space& space, CalculusKind kind, const Field& f) {
  return 0.5 * grad_modulus_sq(space, kind, f).dot(space.measure());
}

Dpm dpm(const Space& space, CalculusKind kind, const Field& f, const Field& g, int max_k) {
  const int n = space.size();
  Dpm out{Field::Zero(n), Field::Zero(n)};
  for (int x = 0; x < n; ++x) {
    if (kind == CalculusKind::kQuadratic) {
      double acc = 0.0;
      for (const Neighbor& nb : space.neighbors(x))
        acc += nb.weight * (f[nb.point] - f[x]) * (g[nb.point] - g[x]);
      out.minus[x] = out.plus[x] = acc / (2.0 * space.mass(x));
    } else {
      std::tie(out.minus[x], out.plus[x]) = slope_dpm_at(space, f, g, x, max_k);
    }
  }
  return out;
}

Field dpm_quotient(const Space& space, CalculusKind kind, const Field& f, const Field& g, double eps) {
  const int n = space.size();
  Field out = Field::Zero(n);
  for (int x = 0; x < n; ++x) {
    const auto& nbs = space.neighbors(x);
    if (kind == CalculusKind::kQuadratic) {
      double acc = 0.0;
      for (const Neighbor& nb : nbs) {
        const double df = f[nb.point] - f[x];
        acc += nb.weight * df * ((g[nb.point] - g[x]) + 0.5 * eps * df);
      }
      out[x] = acc / (2.0 * space.mass(x));
      continue;
    }
    if (nbs.empty()) continue;
    double top = 0.0;
    for (const Neighbor& nb : nbs) {
      const double a = (g[nb.point] - g[x]) / nb.dist;
      top = std::max(top, a * a);
    }
    const double snap = 8.0 * std::numeric_limits<double>::epsilon() * top;
    double best = -std::numeric_limits<double>::infinity();
    for (const Neighbor& nb : nbs) {
      const double a = (g[nb.point] - g[x]) / nb.dist;
      const double b = (f[nb.point] - f[x]) / nb.dist;
      double gap = a * a - top;
      if (std::abs(gap) <= snap) gap = 0.0;
      best = std::max(best, gap + eps * b * (2.0 * a + eps * b));
    }
    out[x] = best / (2.0 * eps);
  }
  return out;
}

Eigen::MatrixXd dirichlet_matrix(const Space& space, const Field& density) {
  const int n = space.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : space.edges()) {
    const double c = e.weight * 0.5 * (density[e.a] + density[e.b]);
    a(e.a, e.a) += c;
    a(e.b, e.b) += c;
    a(e.a, e.b) -= c;
    a(e.b, e.a) -= c;
  }
  return a;
}

DualNorm dual_norm(const Space& space, CalculusKind kind, const Field& ell, const Field& density,
                   int iterations) {
  if (ell.size() != space.size() || density.size() != space.size())
    throw Error(ErrorKind::kBadInput, "functional size does not match space");
  const double total = ell.sum();
  if (std::abs(total) > 1e-9 * std::max(1.0, ell.cwiseAbs().sum())) {
    std::ostringstream os;
    os.precision(17);
    os << "functional does not annihilate constants (sum " << total << ")";
    throw Error(ErrorKind::kUnrepresentable, os.str());
  }
  if (ell.cwiseAbs().maxCoeff() == 0.0) {
    DualNorm zero;
    if (kind == CalculusKind::kQuadratic) zero.phi = Field::Zero(space.size());
    zero.approximate = kind == CalculusKind::kSlope;
    return zero;
  }
  if (kind == CalculusKind::kQuadratic) return quadratic_dual_norm(space, ell, density);
  return slope_dual_norm(space, ell, density, iterations);
}

std::vector<Field> truncations(const Field& phi, const std::vector<double>& levels) {
  std::vector<Field> out;
  out.reserve(levels.size());
  for (double level : levels) out.push_back(phi.cwiseMin(level));
  return out;
}

namespace {

// Piecewise affine function given by sorted breakpoints and the slope on each
// of the breakpoints.size() + 1 pieces, continuous, value 0 at r = 0 offset.
struct PiecewiseAffine {
  std::vector<double> breaks;
  std::function<double(double)> eval;
  std::vector<double> slopes;

  int piece(double r) const {
    return static_cast<int>(std::upper_bound(breaks.begin(), breaks.end(), r) - breaks.begin());
  }
  double lip() const {
    double l = 0.0;
    for (double s : slopes) l = std::max(l, std::abs(s));
    return l;
  }
};

// Index of a closed piece containing every value, or -1.
int common_piece(const PiecewiseAffine& phi, const std::vector<double>& values) {
  const int pieces = static_cast<int>(phi.breaks.size()) + 1;
  for (int p = 0; p < pieces; ++p) {
    const double lo = p == 0 ? -std::numeric_limits<double>::infinity() : phi.breaks[p - 1];
    const double hi = p == pieces - 1 ? std::numeric_limits<double>::infinity() : phi.breaks[p];
    bool inside = true;
    for (double v : values) inside = inside && v >= lo && v <= hi;
    if (inside) return p;
  }
  return -1;
}

}  // namespace

StructureReport structure_tests(const Space& space, CalculusKind kind,
                                const std::vector<Field>& fns) {
  if (fns.empty()) throw Error(ErrorKind::kBadInput, "structure tests need sample functions");
  StructureReport rep;
  const int n = space.size();
  auto s2 = [&](const Field& f) { return grad_modulus_sq(space, kind, f).dot(space.measure()); };

  for (std::size_t i = 0; i < fns.size(); ++i) {
    const Field& f = fns[i];
    const Field& g = fns[(i + 1) % fns.size()];
    const Field& h = fns[(i + 2) % fns.size()];
    const double para = std::abs(s2(f + g) + s2(f - g) - 2.0 * s2(f) - 2.0 * s2(g));
    rep.parallelogram = std::max(rep.parallelogram, para);

    const Dpm fg = dpm(space, kind, f, g);
    rep.dpm_gap = std::max(rep.dpm_gap, (fg.plus - fg.minus).maxCoeff());
    const Dpm neg = dpm(space, kind, Field(-f), g);
    rep.signpm = std::max(rep.signpm, (neg.plus + fg.minus).cwiseAbs().maxCoeff());

    const Field diff = f - h;
    const Dpm dd = dpm(space, kind, diff, g);
    const Field bound = grad_modulus(space, kind, diff).cwiseProduct(grad_modulus(space, kind, g));
    rep.normpm = std::max(rep.normpm, (dd.plus.cwiseAbs().cwiseMax(dd.minus.cwiseAbs()) - bound).maxCoeff());

    const double lambda = 0.3;
    const Dpm mix = dpm(space, kind, Field((1.0 - lambda) * f + lambda * h), g);
    const Dpm fh = dpm(space, kind, h, g);
    rep.convexity = std::max(rep.convexity,
                             (mix.plus - (1.0 - lambda) * fg.plus - lambda * fh.plus).maxCoeff());

    // Chain rule for piecewise affine phi: truncation and truncated |r|.
    const double level = 0.5 * f.cwiseAbs().maxCoeff();
    if (level > 0.0) {
      PiecewiseAffine trunc{{-level, level},
                            [level](double r) { return std::min(level, std::max(-level, r)); },
                            {0.0, 1.0, 0.0}};
      PiecewiseAffine tabs{{-level, 0.0, level},
                           [level](double r) { return std::min(level, std::abs(r)); },
                           {0.0, -1.0, 1.0, 0.0}};
      for (const PiecewiseAffine* phi : {&trunc, &tabs}) {
        Field composed(n);
        for (int x = 0; x < n; ++x) composed[x] = phi->eval(f[x]);
        const Field lhs = grad_modulus(space, kind, composed);
        const Field df = grad_modulus(space, kind, f);
        for (int x = 0; x < n; ++x) {
          rep.chain_excess = std::max(rep.chain_excess, lhs[x] - phi->lip() * df[x]);
          std::vector<double> stencil{f[x]};
          for (const Neighbor& nb : space.neighbors(x)) stencil.push_back(f[nb.point]);
          const int p = common_piece(*phi, stencil);
          if (p >= 0)
            rep.chain_affine =
                std::max(rep.chain_affine, std::abs(lhs[x] - std::abs(phi->slopes[p]) * df[x]));
        }
      }
    }
    {
      Field composed = f.array().sin().matrix();
      const Field lhs = grad_modulus(space, kind, composed);
      const Field rhs = f.array().cos().abs().matrix().cwiseProduct(grad_modulus(space, kind, f));
      rep.chain_smooth = std::max(rep.chain_smooth, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    {
      const Field lhs = grad_modulus(space, kind, Field(f.cwiseProduct(g)));
      const Field rhs = f.cwiseAbs().cwiseProduct(grad_modulus(space, kind, g)) +
                        g.cwiseAbs().cwiseProduct(grad_modulus(space, kind, f));
      rep.leibniz_excess = std::max(rep.leibniz_excess, (lhs - rhs).maxCoeff());
    }
  }
  return rep;
}

}  // namespace mmflow
