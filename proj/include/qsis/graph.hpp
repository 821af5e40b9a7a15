#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qsis {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Largest order for which a dense N x N view is materialised.
inline constexpr int kDenseLimit = 10000;

struct Edge {
  int u = 0;
  int v = 0;
  auto operator<=>(const Edge&) const = default;
};

// Simple undirected graph on nodes 0..N-1. Edges are stored once with u < v,
// sorted; neighbour lists are kept in CSR form.
class Graph {
 public:
  Graph() = default;
  // Throws std::invalid_argument on self-loops, duplicate edges or ids >= n.
  Graph(int n_nodes, std::vector<Edge> edges);

  int n_nodes() const noexcept { return n_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  int max_degree() const;
  bool has_edge(int u, int v) const;

  SparseMatrix adjacency() const;
  // Dense 0/1 view; throws std::length_error above kDenseLimit nodes.
  Eigen::MatrixXd dense_adjacency() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<int> adj_;
};

// Ordered partition of 0..N-1 into nonempty disjoint cells.
class Partition {
 public:
  Partition() = default;
  // Throws std::invalid_argument on overlap, gap, unknown id or empty cell.
  Partition(int n_nodes, std::vector<std::vector<int>> cells);

  static Partition whole(int n_nodes);
  static Partition singletons(int n_nodes);
  // Contiguous cells: the first sizes[0] ids form cell 0, and so on.
  static Partition contiguous(std::span<const int> sizes);

  int n_nodes() const noexcept { return static_cast<int>(cell_of_.size()); }
  int n_cells() const noexcept { return static_cast<int>(cells_.size()); }
  const std::vector<int>& cell(int i) const { return cells_[i]; }
  const std::vector<std::vector<int>>& cells() const noexcept { return cells_; }
  int cell_of(int v) const { return cell_of_[v]; }
  const std::vector<int>& cell_index() const noexcept { return cell_of_; }
  int size(int i) const { return static_cast<int>(cells_[i].size()); }
  Eigen::VectorXi sizes() const;

 private:
  std::vector<std::vector<int>> cells_;
  std::vector<int> cell_of_;
};

// Adjacency with two rate classes: weight 1 inside a cell, epsilon across
// cells. The cell index is retained so consumers can recover the class of an
// edge without comparing floating-point weights.
struct WeightedAdjacency {
  SparseMatrix matrix;
  double epsilon = 1.0;
  std::vector<int> cell_of;

  int n_nodes() const { return static_cast<int>(matrix.rows()); }
  bool intra(int u, int v) const { return cell_of[u] == cell_of[v]; }
  double max_row_sum() const;
  Eigen::MatrixXd dense() const;
};

WeightedAdjacency weighted_adjacency(const Graph& graph,
                                     const Partition& partition,
                                     double epsilon);

// --- text formats -----------------------------------------------------------
// Graph: first non-comment line N, then one "u v" pair per line, '#' comments.
// Partition: one line per cell with whitespace separated node ids.

Graph parse_graph(std::istream& in);
Graph load_graph(const std::filesystem::path& path);
std::string format_graph(const Graph& graph);
void save_graph(const Graph& graph, const std::filesystem::path& path);

Partition parse_partition(std::istream& in, int n_nodes);
Partition load_partition(const std::filesystem::path& path, const Graph& graph);
std::string format_partition(const Partition& partition);
void save_partition(const Partition& partition,
                    const std::filesystem::path& path);

}  // namespace qsis
