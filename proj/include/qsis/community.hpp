#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsis/graph.hpp"

namespace qsis {

// Internal wiring of one community.
struct CellShape {
  enum class Kind { empty, ring, clique, regular };
  Kind kind = Kind::empty;
  int degree = 0;  // only for Kind::regular

  static CellShape empty() { return {Kind::empty, 0}; }
  static CellShape ring() { return {Kind::ring, 2}; }
  static CellShape clique() { return {Kind::clique, 0}; }
  static CellShape regular(int d) { return {Kind::regular, d}; }

  // Degree of every node inside a cell of `size` nodes.
  int internal_degree(int size) const;
  std::string name() const;
};

// Link between two cells of the quotient graph: every node of cell i has
// d_ij neighbours in cell j and every node of j has d_ji in i.
struct QuotientEdge {
  int i = 0;
  int j = 0;
  int d_ij = 0;
  int d_ji = 0;
};

struct CommunitySpec {
  std::vector<int> sizes;
  std::vector<CellShape> shapes;
  std::vector<QuotientEdge> links;

  int n_cells() const { return static_cast<int>(sizes.size()); }
  int n_nodes() const;
  // Cell-degree matrix implied by the spec (diagonal from the templates).
  Eigen::MatrixXi cell_degrees() const;
  // Throws std::invalid_argument on any infeasible entry.
  void validate() const;
};

struct CommunityGraph {
  Graph graph;
  Partition partition;
};

// Lays out every cell with its template and every quotient link with the
// circulant rule: node a of V_i is joined to nodes (a*d_ij + t) mod k_j,
// t = 0..d_ij-1, of V_j. Cells occupy contiguous id ranges in order.
CommunityGraph build_community_graph(const CommunitySpec& spec);

// d-regular circulant on k nodes (offsets 1..d/2 plus k/2 when d is odd),
// using local ids 0..k-1.
std::vector<Edge> circulant_edges(int k, int d);

// Key-value text:
//   n = 4
//   sizes = 1 2 4 6
//   templates = empty regular:1 ring regular:3
//   0 1 2 1          (quotient link "i j d_ij d_ji", 0-based cells)
CommunitySpec parse_community_spec(std::istream& in);
CommunitySpec load_community_spec(const std::filesystem::path& path);
std::string format_community_spec(const CommunitySpec& spec);

}  // namespace qsis
