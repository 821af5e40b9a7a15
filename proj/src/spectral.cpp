#include "qsis/spectral.hpp"

#include <algorithm>
#include <vector>

namespace qsis {

namespace {

double off_diagonal_radius(const QuotientModel& qm,
                           const PowerIterationOptions& opts) {
  return spectral_radius(qm.off_diagonal(), opts).lambda1;
}

}  // namespace

double weyl_lower_bound(const QuotientModel& qm,
                        const PowerIterationOptions& opts) {
  const double max_internal = qm.d.diagonal().maxCoeff();
  return threshold(max_internal + off_diagonal_radius(qm, opts));
}

std::optional<double> homogeneous_lambda1(const QuotientModel& qm,
                                          const PowerIterationOptions& opts) {
  const int n = qm.n_cells();
  const int k = qm.sizes[0];
  const int d = qm.d(0, 0);
  int cross = 0;
  for (int i = 0; i < n; ++i) {
    if (qm.sizes[i] != k || qm.d(i, i) != d) return std::nullopt;
    for (int j = 0; j < n; ++j) {
      if (i == j || qm.d(i, j) == 0) continue;
      if (cross == 0) cross = qm.d(i, j);
      if (qm.d(i, j) != cross) return std::nullopt;
    }
  }
  return d + cross * qm.epsilon * spectral_radius(qm.B, opts).lambda1;
}

ThresholdBounds threshold_bounds(const QuotientModel& qm,
                                 const PowerIterationOptions& opts) {
  ThresholdBounds b;
  b.lambda1 = spectral_radius(qm.Q, opts).lambda1;
  b.tau_c = threshold(b.lambda1);
  b.tau_star = weyl_lower_bound(qm, opts);
  if (auto h = homogeneous_lambda1(qm, opts)) b.exact_homogeneous = threshold(*h);
  return b;
}

double cell_perturbation_bound(const CellPerturbation& c) {
  if (c.changed_edges == 0) return 0.0;
  const double k = c.cell_size;
  double bound = std::min(std::sqrt(2.0 * c.changed_edges * (k - 1.0) / k),
                          static_cast<double>(c.max_degree));
  if (c.connected)
    bound = std::min(bound,
                     std::sqrt(2.0 * c.changed_edges - c.endpoints + 1.0));
  return bound;
}

double perturbation_bound(const PerturbationReport& report) {
  double bound = 0.0;
  for (const auto& c : report.cells)
    bound = std::max(bound, cell_perturbation_bound(c));
  return bound;
}

double almost_equitable_lower_bound(const QuotientModel& qm,
                                    std::span<const double> lambda1_cells,
                                    double pert_bound,
                                    const PowerIterationOptions& opts) {
  const double internal =
      lambda1_cells.empty()
          ? 0.0
          : *std::max_element(lambda1_cells.begin(), lambda1_cells.end());
  return threshold(internal + off_diagonal_radius(qm, opts) + pert_bound);
}

double almost_equitable_lower_bound(const QuotientModel& base,
                                    const PerturbationReport& report,
                                    const PowerIterationOptions& opts) {
  if (report.kind != PerturbationKind::addition)
    return weyl_lower_bound(base, opts);
  std::vector<double> internal(base.n_cells());
  for (int i = 0; i < base.n_cells(); ++i) internal[i] = base.d(i, i);
  return almost_equitable_lower_bound(base, internal, perturbation_bound(report),
                                      opts);
}

}  // namespace qsis
