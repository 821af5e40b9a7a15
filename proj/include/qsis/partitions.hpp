#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qsis/graph.hpp"

namespace qsis {

// d(i, j) = number of neighbours in cell j of any node of cell i. For a
// merely almost-equitable partition the diagonal holds the per-cell maximum
// internal degree and `equitable` is false; such a matrix must not be fed to
// quotient_matrix().
struct CellDegreeMatrix {
  Eigen::MatrixXi d;
  bool equitable = false;
};

// First node (in id order) whose degree towards `target_cell` differs from the
// degree of the smallest node of its own cell.
struct Violation {
  int node = -1;
  int node_cell = -1;
  int target_cell = -1;
  int observed = 0;
  int expected = 0;
  std::string message() const;
};

using PartitionCheck = std::variant<CellDegreeMatrix, Violation>;

inline bool holds(const PartitionCheck& c) {
  return std::holds_alternative<CellDegreeMatrix>(c);
}

PartitionCheck check_equitable(const Graph& graph, const Partition& partition);
PartitionCheck check_almost_equitable(const Graph& graph,
                                      const Partition& partition);

// True iff every off-diagonal entry has the form alpha*lcm(k_i,k_j)/k_i with
// 0 <= alpha <= gcd(k_i,k_j), the pair is consistent (k_i d_ij = k_j d_ji)
// and every diagonal entry admits a d_ii-regular graph on k_i nodes.
bool feasibility_check(std::span<const int> sizes, const Eigen::MatrixXi& d);

struct QuotientModel {
  Eigen::MatrixXi d;        // cell-degree matrix
  Eigen::VectorXi sizes;    // k_i
  Eigen::VectorXd s;        // sqrt(k_i)
  Eigen::MatrixXd B;        // simple quotient graph adjacency
  Eigen::MatrixXd Q;        // diag(d_ii) + eps*sqrt(d_ij d_ji) b_ij
  Eigen::MatrixXd Q_tilde;  // diag(1/s) Q diag(s); entries eps*d_ij off the diagonal
  double epsilon = 1.0;

  int n_cells() const { return static_cast<int>(Q.rows()); }
  int n_nodes() const { return sizes.sum(); }
  // Q without its diagonal.
  Eigen::MatrixXd off_diagonal() const;
};

// Closed-form quotient matrix. Throws std::invalid_argument unless
// `d.equitable`.
QuotientModel quotient_matrix(const CellDegreeMatrix& d,
                              std::span<const int> sizes, double epsilon);
QuotientModel quotient_matrix(const CellDegreeMatrix& d,
                              const Eigen::VectorXi& sizes, double epsilon);

// Runs check_equitable and builds the quotient; throws qsis::Error carrying
// the violation message otherwise.
QuotientModel quotient_model(const Graph& graph, const Partition& partition,
                             double epsilon);

// n x N matrix with s_iv = 1/sqrt(|V_i|) for v in V_i.
Eigen::MatrixXd projection_matrix(const Partition& partition);

// --- intra-cell perturbations ----------------------------------------------

enum class PerturbationKind { none, addition, deletion };

struct CellPerturbation {
  Eigen::MatrixXd R;       // k_i x k_i, local indices follow the sorted cell
  int cell_size = 0;       // k_i
  int changed_edges = 0;   // e_i
  int endpoints = 0;       // k'_i, nodes of G_i^C
  int max_degree = 0;      // Delta(G_i^C)
  bool connected = true;   // G_i^C connected (vacuously true when empty)
};

struct PerturbationReport {
  PerturbationKind kind = PerturbationKind::none;
  std::vector<CellPerturbation> cells;
  std::vector<Edge> changed;  // global ids

  // N x N block-diagonal perturbation matrix.
  SparseMatrix global_matrix(const Partition& partition) const;
};

// Compares two graphs on the same partition whose edge sets differ only
// inside cells. Throws std::invalid_argument on cross-cell differences or on
// a mix of additions and deletions.
PerturbationReport perturbation_decompose(const Graph& base,
                                          const Graph& perturbed,
                                          const Partition& partition);

}  // namespace qsis
