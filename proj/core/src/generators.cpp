#include "mmflow/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "mmflow/error.hpp"

namespace mmflow {
namespace {

std::vector<std::string> index_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

double grid_weight(const Field& m, int x, int y, double d) {
  return (m[x] + m[y]) / (2.0 * d * d);
}

std::vector<std::string_view> split_args(std::string_view args) {
  std::vector<std::string_view> out;
  while (!args.empty()) {
    const auto comma = args.find(',');
    std::string_view tok = args.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    out.push_back(tok);
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  return out;
}

int parse_int(std::string_view tok) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw Error(ErrorKind::kBadSpec, "expected integer, got '" + std::string(tok) + "'");
  return value;
}

double parse_double(std::string_view tok) {
  std::string s(tok);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw Error(ErrorKind::kBadSpec, "expected number, got '" + s + "'");
  return value;
}

}  // namespace

GeneratorSpec parse_generator_spec(std::string_view text, std::uint64_t seed) {
  std::string_view name = text;
  std::string_view args;
  if (const auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw Error(ErrorKind::kBadSpec, "unbalanced parenthesis");
    name = text.substr(0, open);
    args = text.substr(open + 1, text.size() - open - 2);
  } else if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    name = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  const auto toks = split_args(args);
  GeneratorSpec spec;
  spec.seed = seed;
  auto need = [&](std::size_t count) {
    if (toks.size() != count)
      throw Error(ErrorKind::kBadSpec,
                  std::string(name) + " takes " + std::to_string(count) + " argument(s)");
  };
  if (name == "two_point") {
    spec.kind = GeneratorKind::kTwoPoint;
    spec.length = toks.empty() ? 1.0 : parse_double(toks.at(0));
    if (toks.size() > 1) need(1);
  } else if (name == "path_grid_1d") {
    need(1);
    spec.kind = GeneratorKind::kPathGrid1d;
    spec.size = parse_int(toks[0]);
  } else if (name == "grid_2d") {
    need(1);
    spec.kind = GeneratorKind::kGrid2d;
    spec.size = parse_int(toks[0]);
  } else if (name == "cycle") {
    need(1);
    spec.kind = GeneratorKind::kCycle;
    spec.size = parse_int(toks[0]);
  } else if (name == "random_euclidean") {
    if (toks.size() == 1) {
      spec.size = parse_int(toks[0]);
    } else {
      need(2);
      spec.size = parse_int(toks[0]);
      spec.dim = parse_int(toks[1]);
    }
    spec.kind = GeneratorKind::kRandomEuclidean;
  } else {
    throw Error(ErrorKind::kBadSpec, "unknown generator '" + std::string(name) + "'");
  }
  return spec;
}

std::string to_string(const GeneratorSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case GeneratorKind::kTwoPoint: os << "two_point(" << spec.length << ")"; break;
    case GeneratorKind::kPathGrid1d: os << "path_grid_1d(" << spec.size << ")"; break;
    case GeneratorKind::kGrid2d: os << "grid_2d(" << spec.size << ")"; break;
    case GeneratorKind::kCycle: os << "cycle(" << spec.size << ")"; break;
    case GeneratorKind::kRandomEuclidean:
      os << "random_euclidean(" << spec.size << "," << spec.dim << ")";
      break;
  }
  return os.str();
}

Space generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::kTwoPoint: return two_point(spec.length);
    case GeneratorKind::kPathGrid1d: return path_grid_1d(spec.size);
    case GeneratorKind::kGrid2d: return grid_2d(spec.size);
    case GeneratorKind::kCycle: return cycle(spec.size);
    case GeneratorKind::kRandomEuclidean:
      return random_euclidean(spec.size, spec.dim, spec.seed);
  }
  throw Error(ErrorKind::kBadSpec, "unknown generator kind");
}

Space two_point(double length) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorKind::kBadSpec, "two_point length must be positive");
  Eigen::MatrixXd d(2, 2);
  d << 0.0, length, length, 0.0;
  Field m = Field::Constant(2, 0.5);
  return build_space(index_ids(2), std::move(d), std::move(m),
                     {{0, 1, 1.0 / (length * length)}});
}

Space path_grid_1d(int cells) {
  if (cells < 1) throw Error(ErrorKind::kBadSpec, "path_grid_1d needs N >= 1");
  const int n = cells + 1;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j) / static_cast<double>(cells);
  Field m = Field::Constant(n, 1.0 / n);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, grid_weight(m, i, i + 1, d(i, i + 1))});
  return build_space(index_ids(n), std::move(d), std::move(m), std::move(edges));
}

Space grid_2d(int cells) {
  if (cells < 1) throw Error(ErrorKind::kBadSpec, "grid_2d needs N >= 1");
  const int side = cells + 1;
  const int n = side * side;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d(i, j) = (std::abs(i / side - j / side) + std::abs(i % side - j % side)) /
                static_cast<double>(cells);
  Field m = Field::Constant(n, 1.0 / n);
  std::vector<Edge> edges;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const int x = r * side + c;
      if (c + 1 < side) edges.push_back({x, x + 1, grid_weight(m, x, x + 1, d(x, x + 1))});
      if (r + 1 < side) edges.push_back({x, x + side, grid_weight(m, x, x + side, d(x, x + side))});
    }
  return build_space(index_ids(n), std::move(d), std::move(m), std::move(edges));
}

Space cycle(int points) {
  if (points < 2) throw Error(ErrorKind::kBadSpec, "cycle needs N >= 2");
  const int n = points;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = std::abs(i - j);
      d(i, j) = std::min(k, n - k);
    }
  Field m = Field::Constant(n, 1.0 / n);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (n == 2 && i == 1) break;
    edges.push_back({i, j, grid_weight(m, i, j, 1.0)});
  }
  return build_space(index_ids(n), std::move(d), std::move(m), std::move(edges));
}

Space random_euclidean(int points, int dim, std::uint64_t seed) {
  if (points < 2) throw Error(ErrorKind::kBadSpec, "random_euclidean needs n >= 2");
  if (dim < 1) throw Error(ErrorKind::kBadSpec, "random_euclidean needs dim >= 1");
  const int n = points;
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd coords(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) coords(i, k) = unit_double(rng);

  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = (coords.row(i) - coords.row(j)).norm();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(d(i, j) > 0.0)) throw Error(ErrorKind::kBadSpec, "coincident random points");

  std::set<std::pair<int, int>> pairs;
  // Prim's minimum spanning tree.
  {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, inf);
    std::vector<int> parent(n, -1);
    best[0] = 0.0;
    for (int step = 0; step < n; ++step) {
      int pick = -1;
      for (int i = 0; i < n; ++i)
        if (!in_tree[i] && (pick < 0 || best[i] < best[pick])) pick = i;
      in_tree[pick] = 1;
      if (parent[pick] >= 0) pairs.insert(std::minmax(pick, parent[pick]));
      for (int i = 0; i < n; ++i)
        if (!in_tree[i] && d(pick, i) < best[i]) {
          best[i] = d(pick, i);
          parent[i] = pick;
        }
    }
  }
  const int knn = std::min(3, n - 1);
  for (int i = 0; i < n; ++i) {
    std::vector<int> order;
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(i, a) < d(i, b); });
    for (int k = 0; k < knn; ++k) pairs.insert(std::minmax(i, order[k]));
  }

  Field m = Field::Constant(n, 1.0 / n);
  std::vector<Edge> edges;
  for (const auto& [a, b] : pairs) edges.push_back({a, b, grid_weight(m, a, b, d(a, b))});
  return build_space(index_ids(n), std::move(d), std::move(m), std::move(edges));
}

}  // namespace mmflow
