#include "qsis/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qsis/error.hpp"

namespace qsis {

namespace {

std::string edge_text(int u, int v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

// Strips a trailing '#' comment and reports whether anything but blanks is
// left.
bool content_line(std::string& line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  return line.find_first_not_of(" \t\r") != std::string::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

Graph::Graph(int n_nodes, std::vector<Edge> edges) : n_(n_nodes) {
  if (n_nodes < 0) throw std::invalid_argument("negative node count");
  for (auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
      throw std::invalid_argument("node id out of range in edge " +
                                  edge_text(e.u, e.v));
    if (e.u == e.v)
      throw std::invalid_argument("self-loop " + edge_text(e.u, e.v));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end());
      dup != edges.end())
    throw std::invalid_argument("duplicate edge " + edge_text(dup->u, dup->v));
  edges_ = std::move(edges);

  std::vector<int> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (int v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adj_.resize(offsets_[n_]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adj_[fill[e.u]++] = e.v;
    adj_[fill[e.v]++] = e.u;
  }
  for (int v = 0; v < n_; ++v)
    std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1]);
}

int Graph::max_degree() const {
  int best = 0;
  for (int v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::has_edge(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

SparseMatrix Graph::adjacency() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * edges_.size());
  for (const auto& e : edges_) {
    triplets.emplace_back(e.u, e.v, 1.0);
    triplets.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix a(n_, n_);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  if (n_ > kDenseLimit)
    throw std::length_error("dense adjacency requested for " +
                            std::to_string(n_) + " nodes");
  return Eigen::MatrixXd(adjacency());
}

Partition::Partition(int n_nodes, std::vector<std::vector<int>> cells)
    : cells_(std::move(cells)), cell_of_(n_nodes, -1) {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].empty())
      throw std::invalid_argument("empty cell " + std::to_string(i));
    for (int v : cells_[i]) {
      if (v < 0 || v >= n_nodes)
        throw std::invalid_argument("unknown node id " + std::to_string(v));
      if (cell_of_[v] != -1)
        throw std::invalid_argument("overlap at node " + std::to_string(v));
      cell_of_[v] = static_cast<int>(i);
    }
    std::sort(cells_[i].begin(), cells_[i].end());
  }
  for (int v = 0; v < n_nodes; ++v)
    if (cell_of_[v] == -1)
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " not covered by any cell");
}

Partition Partition::whole(int n_nodes) {
  std::vector<int> all(n_nodes);
  for (int v = 0; v < n_nodes; ++v) all[v] = v;
  return Partition(n_nodes, {std::move(all)});
}

Partition Partition::singletons(int n_nodes) {
  std::vector<std::vector<int>> cells(n_nodes);
  for (int v = 0; v < n_nodes; ++v) cells[v] = {v};
  return Partition(n_nodes, std::move(cells));
}

Partition Partition::contiguous(std::span<const int> sizes) {
  std::vector<std::vector<int>> cells;
  int next = 0;
  for (int k : sizes) {
    std::vector<int> cell(k);
    for (int& v : cell) v = next++;
    cells.push_back(std::move(cell));
  }
  return Partition(next, std::move(cells));
}

Eigen::VectorXi Partition::sizes() const {
  Eigen::VectorXi k(n_cells());
  for (int i = 0; i < n_cells(); ++i) k[i] = size(i);
  return k;
}

double WeightedAdjacency::max_row_sum() const {
  if (matrix.rows() == 0) return 0.0;
  return (matrix * Eigen::VectorXd::Ones(matrix.cols())).maxCoeff();
}

Eigen::MatrixXd WeightedAdjacency::dense() const {
  if (n_nodes() > kDenseLimit)
    throw std::length_error("dense adjacency requested for " +
                            std::to_string(n_nodes()) + " nodes");
  return Eigen::MatrixXd(matrix);
}

WeightedAdjacency weighted_adjacency(const Graph& graph,
                                     const Partition& partition,
                                     double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (partition.n_nodes() != graph.n_nodes())
    throw std::invalid_argument("partition and graph disagree on node count");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * graph.n_edges());
  for (const auto& e : graph.edges()) {
    const double w =
        partition.cell_of(e.u) == partition.cell_of(e.v) ? 1.0 : epsilon;
    triplets.emplace_back(e.u, e.v, w);
    triplets.emplace_back(e.v, e.u, w);
  }
  WeightedAdjacency aw;
  aw.matrix.resize(graph.n_nodes(), graph.n_nodes());
  aw.matrix.setFromTriplets(triplets.begin(), triplets.end());
  aw.epsilon = epsilon;
  aw.cell_of = partition.cell_index();
  return aw;
}

Graph parse_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long n = -1;
  std::vector<Edge> edges;
  std::set<Edge> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!content_line(line)) continue;
    std::istringstream fields(line);
    if (n < 0) {
      std::string extra;
      if (!(fields >> n) || n < 0 || (fields >> extra))
        throw ParseError(lineno, "expected node count");
      continue;
    }
    long u = 0, v = 0;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra))
      throw ParseError(lineno, "expected \"u v\"");
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw ParseError(lineno, "node id out of range in edge " +
                                   edge_text(static_cast<int>(u),
                                             static_cast<int>(v)) +
                                   " (N=" + std::to_string(n) + ")");
    if (u == v)
      throw ParseError(lineno, "self-loop " + edge_text(static_cast<int>(u),
                                                        static_cast<int>(v)));
    Edge e{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
    if (!seen.insert(e).second)
      throw ParseError(lineno, "duplicate edge " + edge_text(e.u, e.v));
    edges.push_back(e);
  }
  if (n < 0) throw ParseError(0, "missing node count");
  return Graph(static_cast<int>(n), std::move(edges));
}

Graph load_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_graph(in);
}

std::string format_graph(const Graph& graph) {
  std::string out = std::to_string(graph.n_nodes()) + "\n";
  for (const auto& e : graph.edges())
    out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  write_text(path, format_graph(graph));
}

Partition parse_partition(std::istream& in, int n_nodes) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<int>> cells;
  std::vector<int> owner(n_nodes, -1);
  while (std::getline(in, line)) {
    ++lineno;
    if (!content_line(line)) continue;
    std::istringstream fields(line);
    std::vector<int> cell;
    std::string token;
    while (fields >> token) {
      long v = 0;
      try {
        std::size_t used = 0;
        v = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::logic_error&) {
        throw ParseError(lineno, "bad node id '" + token + "'");
      }
      if (v < 0 || v >= n_nodes)
        throw ParseError(lineno, "unknown node id " + std::to_string(v));
      if (owner[v] != -1)
        throw ParseError(lineno, "overlap at node " + std::to_string(v));
      owner[v] = static_cast<int>(cells.size());
      cell.push_back(static_cast<int>(v));
    }
    cells.push_back(std::move(cell));
  }
  for (int v = 0; v < n_nodes; ++v)
    if (owner[v] == -1)
      throw ParseError(0, "gap: node " + std::to_string(v) +
                              " not covered by any cell");
  return Partition(n_nodes, std::move(cells));
}

Partition load_partition(const std::filesystem::path& path,
                         const Graph& graph) {
  auto in = open_input(path);
  return parse_partition(in, graph.n_nodes());
}

std::string format_partition(const Partition& partition) {
  std::string out;
  for (const auto& cell : partition.cells()) {
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(cell[i]);
    }
    out += '\n';
  }
  return out;
}

void save_partition(const Partition& partition,
                    const std::filesystem::path& path) {
  write_text(path, format_partition(partition));
}

}  // namespace qsis
