#include "qsis/community.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qsis/error.hpp"

namespace qsis {

int CellShape::internal_degree(int size) const {
  switch (kind) {
    case Kind::empty: return 0;
    case Kind::ring: return 2;
    case Kind::clique: return size - 1;
    case Kind::regular: return degree;
  }
  return 0;
}

std::string CellShape::name() const {
  switch (kind) {
    case Kind::empty: return "empty";
    case Kind::ring: return "ring";
    case Kind::clique: return "clique";
    case Kind::regular: return "regular:" + std::to_string(degree);
  }
  return "?";
}

int CommunitySpec::n_nodes() const {
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

Eigen::MatrixXi CommunitySpec::cell_degrees() const {
  const int n = n_cells();
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = shapes[i].internal_degree(sizes[i]);
  for (const auto& l : links) {
    d(l.i, l.j) = l.d_ij;
    d(l.j, l.i) = l.d_ji;
  }
  return d;
}

void CommunitySpec::validate() const {
  const int n = n_cells();
  if (n == 0) throw std::invalid_argument("community spec has no cells");
  if (static_cast<int>(shapes.size()) != n)
    throw std::invalid_argument("need one template per cell");
  for (int i = 0; i < n; ++i) {
    const int k = sizes[i];
    if (k < 1) throw std::invalid_argument("cell " + std::to_string(i) + " is empty");
    const auto& s = shapes[i];
    if (s.kind == CellShape::Kind::ring && k < 3)
      throw std::invalid_argument("ring template needs at least 3 nodes (cell " +
                                  std::to_string(i) + ")");
    const int d = s.internal_degree(k);
    if (d < 0 || d > k - 1 || (static_cast<long>(k) * d) % 2 != 0)
      throw std::invalid_argument("no " + std::to_string(d) +
                                  "-regular graph on " + std::to_string(k) +
                                  " nodes (cell " + std::to_string(i) + ")");
  }
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& l : links) {
    if (l.i < 0 || l.j < 0 || l.i >= n || l.j >= n || l.i == l.j)
      throw std::invalid_argument("bad quotient link " + std::to_string(l.i) +
                                  " " + std::to_string(l.j));
    auto key = std::minmax(l.i, l.j);
    if (!seen.emplace(std::pair{key.first, key.second}, true).second)
      throw std::invalid_argument("duplicate quotient link " +
                                  std::to_string(l.i) + " " +
                                  std::to_string(l.j));
    const long ki = sizes[l.i], kj = sizes[l.j];
    if (l.d_ij < 1 || l.d_ji < 1 || l.d_ij > kj || l.d_ji > ki ||
        ki * l.d_ij != kj * l.d_ji)
      throw std::invalid_argument(
          "infeasible cross degrees on link " + std::to_string(l.i) + "-" +
          std::to_string(l.j) + ": need k_i*d_ij == k_j*d_ji and d_ij <= k_j");
  }
}

std::vector<Edge> circulant_edges(int k, int d) {
  if (d < 0 || d > k - 1 || (static_cast<long>(k) * d) % 2 != 0)
    throw std::invalid_argument("no " + std::to_string(d) +
                                "-regular circulant on " + std::to_string(k) +
                                " nodes");
  std::vector<Edge> edges;
  for (int off = 1; off <= d / 2; ++off)
    for (int a = 0; a < k; ++a) {
      const int b = (a + off) % k;
      // offset k/2 on even k would list every edge twice
      if (2 * off == k && a >= b) continue;
      edges.push_back({a, b});
    }
  if (d % 2 == 1)
    for (int a = 0; a < k / 2; ++a) edges.push_back({a, a + k / 2});
  return edges;
}

CommunityGraph build_community_graph(const CommunitySpec& spec) {
  spec.validate();
  const int n = spec.n_cells();
  std::vector<int> offset(n + 1, 0);
  for (int i = 0; i < n; ++i) offset[i + 1] = offset[i] + spec.sizes[i];

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const int k = spec.sizes[i];
    for (auto e : circulant_edges(k, spec.shapes[i].internal_degree(k)))
      edges.push_back({offset[i] + e.u, offset[i] + e.v});
  }
  for (const auto& l : spec.links) {
    const int kj = spec.sizes[l.j];
    for (int a = 0; a < spec.sizes[l.i]; ++a)
      for (int t = 0; t < l.d_ij; ++t)
        edges.push_back({offset[l.i] + a,
                         offset[l.j] + static_cast<int>(
                                           (static_cast<long>(a) * l.d_ij + t) % kj)});
  }
  Graph g(offset[n], std::move(edges));
  return {std::move(g), Partition::contiguous(spec.sizes)};
}

namespace {

CellShape parse_shape(const std::string& token, std::size_t lineno) {
  if (token == "empty") return CellShape::empty();
  if (token == "ring") return CellShape::ring();
  if (token == "clique") return CellShape::clique();
  if (token.rfind("regular:", 0) == 0) {
    try {
      return CellShape::regular(std::stoi(token.substr(8)));
    } catch (const std::logic_error&) {
    }
  }
  throw ParseError(lineno, "unsupported template '" + token + "'");
}

template <typename T, typename Fn>
std::vector<T> parse_list(std::istringstream& in, Fn fn) {
  std::vector<T> out;
  std::string token;
  while (in >> token) out.push_back(fn(token));
  return out;
}

}  // namespace

CommunitySpec parse_community_spec(std::istream& in) {
  CommunitySpec spec;
  int declared_n = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (auto eq = line.find('='); eq != std::string::npos) {
      std::istringstream key_in(line.substr(0, eq));
      std::string key;
      key_in >> key;
      std::istringstream values(line.substr(eq + 1));
      auto to_int = [&](const std::string& s) {
        try {
          std::size_t used = 0;
          int v = std::stoi(s, &used);
          if (used == s.size()) return v;
        } catch (const std::logic_error&) {
        }
        throw ParseError(lineno, "expected integer, got '" + s + "'");
      };
      if (key == "n") {
        auto v = parse_list<int>(values, to_int);
        if (v.size() != 1) throw ParseError(lineno, "n takes one value");
        declared_n = v[0];
      } else if (key == "sizes") {
        spec.sizes = parse_list<int>(values, to_int);
      } else if (key == "templates" || key == "template") {
        spec.shapes = parse_list<CellShape>(
            values, [&](const std::string& s) { return parse_shape(s, lineno); });
      } else {
        throw ParseError(lineno, "unknown key '" + key + "'");
      }
      continue;
    }
    std::istringstream fields(line);
    QuotientEdge l;
    std::string extra;
    if (!(fields >> l.i >> l.j >> l.d_ij >> l.d_ji) || (fields >> extra))
      throw ParseError(lineno, "expected quotient link \"i j d_ij d_ji\"");
    spec.links.push_back(l);
  }
  if (declared_n >= 0 && declared_n != spec.n_cells())
    throw ParseError(0, "n = " + std::to_string(declared_n) + " but " +
                            std::to_string(spec.n_cells()) + " sizes given");
  if (spec.shapes.size() == 1 && spec.sizes.size() > 1)
    spec.shapes.assign(spec.sizes.size(), spec.shapes.front());
  if (spec.shapes.size() != spec.sizes.size())
    throw ParseError(0, "need one template per cell (or a single template)");
  for (const auto& l : spec.links)
    if (l.i < 0 || l.j < 0 || l.i >= spec.n_cells() || l.j >= spec.n_cells())
      throw ParseError(0, "quotient link refers to unknown cell");
  return spec;
}

CommunitySpec load_community_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_community_spec(in);
}

std::string format_community_spec(const CommunitySpec& spec) {
  std::ostringstream out;
  out << "n = " << spec.n_cells() << "\nsizes =";
  for (int k : spec.sizes) out << ' ' << k;
  out << "\ntemplates =";
  for (const auto& s : spec.shapes) out << ' ' << s.name();
  out << '\n';
  for (const auto& l : spec.links)
    out << l.i << ' ' << l.j << ' ' << l.d_ij << ' ' << l.d_ji << '\n';
  return out.str();
}

}  // namespace qsis
