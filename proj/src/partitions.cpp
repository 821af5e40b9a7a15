#include "qsis/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "qsis/error.hpp"

namespace qsis {

namespace {

// deg(v, V_j) for every j.
std::vector<int> degree_profile(const Graph& g, const Partition& p, int v) {
  std::vector<int> out(p.n_cells(), 0);
  for (int w : g.neighbors(v)) ++out[p.cell_of(w)];
  return out;
}

PartitionCheck check_partition(const Graph& g, const Partition& p,
                               bool require_diagonal) {
  if (g.n_nodes() != p.n_nodes())
    throw std::invalid_argument("partition and graph disagree on node count");
  const int n = p.n_cells();
  std::vector<std::vector<int>> reference(n);
  for (int i = 0; i < n; ++i) reference[i] = degree_profile(g, p, p.cell(i).front());

  CellDegreeMatrix result;
  result.d = Eigen::MatrixXi::Zero(n, n);
  result.equitable = true;
  for (int v = 0; v < g.n_nodes(); ++v) {
    const int i = p.cell_of(v);
    const auto profile = degree_profile(g, p, v);
    for (int j = 0; j < n; ++j) {
      if (profile[j] == reference[i][j]) continue;
      if (j != i || require_diagonal)
        return Violation{v, i, j, profile[j], reference[i][j]};
      result.equitable = false;
    }
    result.d(i, i) = std::max(result.d(i, i), profile[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) result.d(i, j) = reference[i][j];
  return result;
}

}  // namespace

std::string Violation::message() const {
  return "node " + std::to_string(node) + " (cell " + std::to_string(node_cell) +
         ") has " + std::to_string(observed) + " neighbours in cell " +
         std::to_string(target_cell) + ", expected " + std::to_string(expected);
}

PartitionCheck check_equitable(const Graph& graph, const Partition& partition) {
  return check_partition(graph, partition, true);
}

PartitionCheck check_almost_equitable(const Graph& graph,
                                      const Partition& partition) {
  return check_partition(graph, partition, false);
}

bool feasibility_check(std::span<const int> sizes, const Eigen::MatrixXi& d) {
  const int n = static_cast<int>(sizes.size());
  if (d.rows() != n || d.cols() != n) return false;
  for (int i = 0; i < n; ++i) {
    const long ki = sizes[i];
    if (ki < 1) return false;
    if (d(i, i) < 0 || d(i, i) > ki - 1 || (ki * d(i, i)) % 2 != 0) return false;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const long kj = sizes[j];
      const long step = std::lcm(ki, kj) / ki;
      const long dij = d(i, j);
      if (dij < 0 || dij % step != 0 || dij / step > std::gcd(ki, kj))
        return false;
      if (ki * dij != kj * d(j, i)) return false;
    }
  }
  return true;
}

Eigen::MatrixXd QuotientModel::off_diagonal() const {
  Eigen::MatrixXd b = Q;
  b.diagonal().setZero();
  return b;
}

QuotientModel quotient_matrix(const CellDegreeMatrix& d,
                              const Eigen::VectorXi& sizes, double epsilon) {
  if (!d.equitable)
    throw std::invalid_argument("quotient matrix needs an equitable partition");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const int n = static_cast<int>(d.d.rows());
  if (sizes.size() != n)
    throw std::invalid_argument("size vector does not match degree matrix");

  QuotientModel qm;
  qm.d = d.d;
  qm.sizes = sizes;
  qm.epsilon = epsilon;
  qm.s = sizes.cast<double>().cwiseSqrt();
  qm.B = Eigen::MatrixXd::Zero(n, n);
  qm.Q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    qm.Q(i, i) = d.d(i, i);
    for (int j = 0; j < n; ++j) {
      if (i == j || d.d(i, j) == 0) continue;
      qm.B(i, j) = 1.0;
      qm.Q(i, j) =
          epsilon * std::sqrt(static_cast<double>(d.d(i, j)) * d.d(j, i));
    }
  }
  qm.Q_tilde = qm.s.cwiseInverse().asDiagonal() * qm.Q * qm.s.asDiagonal();
  return qm;
}

QuotientModel quotient_matrix(const CellDegreeMatrix& d,
                              std::span<const int> sizes, double epsilon) {
  Eigen::VectorXi k(static_cast<Eigen::Index>(sizes.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i) k[i] = sizes[i];
  return quotient_matrix(d, k, epsilon);
}

QuotientModel quotient_model(const Graph& graph, const Partition& partition,
                             double epsilon) {
  auto check = check_equitable(graph, partition);
  if (auto* v = std::get_if<Violation>(&check))
    throw Error("partition is not equitable: " + v->message());
  return quotient_matrix(std::get<CellDegreeMatrix>(check), partition.sizes(),
                         epsilon);
}

Eigen::MatrixXd projection_matrix(const Partition& partition) {
  Eigen::MatrixXd s =
      Eigen::MatrixXd::Zero(partition.n_cells(), partition.n_nodes());
  for (int i = 0; i < partition.n_cells(); ++i) {
    const double w = 1.0 / std::sqrt(static_cast<double>(partition.size(i)));
    for (int v : partition.cell(i)) s(i, v) = w;
  }
  return s;
}

SparseMatrix PerturbationReport::global_matrix(const Partition& partition) const {
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : changed) {
    t.emplace_back(e.u, e.v, 1.0);
    t.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix r(partition.n_nodes(), partition.n_nodes());
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

PerturbationReport perturbation_decompose(const Graph& base,
                                          const Graph& perturbed,
                                          const Partition& partition) {
  if (base.n_nodes() != perturbed.n_nodes() ||
      base.n_nodes() != partition.n_nodes())
    throw std::invalid_argument("graphs and partition disagree on node count");

  std::vector<Edge> added, removed;
  std::set_difference(perturbed.edges().begin(), perturbed.edges().end(),
                      base.edges().begin(), base.edges().end(),
                      std::back_inserter(added));
  std::set_difference(base.edges().begin(), base.edges().end(),
                      perturbed.edges().begin(), perturbed.edges().end(),
                      std::back_inserter(removed));
  if (!added.empty() && !removed.empty())
    throw std::invalid_argument(
        "perturbation mixes edge additions and deletions");

  PerturbationReport report;
  report.kind = added.empty() ? (removed.empty() ? PerturbationKind::none
                                                 : PerturbationKind::deletion)
                              : PerturbationKind::addition;
  report.changed = added.empty() ? removed : added;

  const int n = partition.n_cells();
  // local index of every node inside its cell
  std::vector<int> local(partition.n_nodes());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < partition.size(i); ++a) local[partition.cell(i)[a]] = a;

  report.cells.resize(n);
  for (int i = 0; i < n; ++i) {
    report.cells[i].cell_size = partition.size(i);
    report.cells[i].R = Eigen::MatrixXd::Zero(partition.size(i), partition.size(i));
  }
  for (const auto& e : report.changed) {
    const int i = partition.cell_of(e.u);
    if (partition.cell_of(e.v) != i)
      throw std::invalid_argument("edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) +
                                  ") differs across cells");
    auto& c = report.cells[i];
    c.R(local[e.u], local[e.v]) = 1.0;
    c.R(local[e.v], local[e.u]) = 1.0;
    ++c.changed_edges;
  }

  for (auto& c : report.cells) {
    const int k = c.cell_size;
    std::vector<int> deg(k, 0), touched;
    for (int a = 0; a < k; ++a) {
      deg[a] = static_cast<int>(c.R.row(a).sum());
      if (deg[a] > 0) touched.push_back(a);
    }
    c.endpoints = static_cast<int>(touched.size());
    c.max_degree = touched.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
    if (touched.empty()) continue;
    std::vector<char> seen(k, 0);
    std::queue<int> frontier;
    frontier.push(touched.front());
    seen[touched.front()] = 1;
    int reached = 1;
    while (!frontier.empty()) {
      const int a = frontier.front();
      frontier.pop();
      for (int b = 0; b < k; ++b)
        if (c.R(a, b) != 0.0 && !seen[b]) {
          seen[b] = 1;
          ++reached;
          frontier.push(b);
        }
    }
    c.connected = reached == c.endpoints;
  }
  return report;
}

}  // namespace qsis
