#include "qsis/nimfa.hpp"

#include <algorithm>
#include <stdexcept>

#include "qsis/spectral.hpp"

namespace qsis {

namespace {

template <typename Pressure>
SteadyState fixed_point(Pressure&& pressure, Eigen::Index dim, double tau,
                        double lambda1, const FixedPointOptions& opts) {
  SteadyState out;
  out.p_inf = Eigen::VectorXd::Zero(dim);
  if (tau <= threshold(lambda1)) {
    out.below_threshold = true;
    out.converged = true;
    return out;
  }
  auto map = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Ones(dim) -
           (Eigen::VectorXd::Ones(dim) + tau * pressure(x)).cwiseInverse();
  };
  Eigen::VectorXd x = Eigen::VectorXd::Ones(dim);
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd next = map(x);
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    out.iterations = it;
    if (change < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.p_inf = x;
  out.residual = (x - map(x)).template lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace

void EpidemicParams::validate() const {
  if (!(beta > 0.0) || !(delta > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("beta, delta and epsilon must be positive");
}

Eigen::VectorXd full_rhs(const WeightedAdjacency& aw,
                         const EpidemicParams& params,
                         const Eigen::VectorXd& p) {
  return nimfa_rhs(aw.matrix, params, p);
}

Eigen::VectorXd reduced_rhs(const QuotientModel& qm,
                            const EpidemicParams& params,
                            const Eigen::VectorXd& pbar) {
  return nimfa_rhs(qm.Q_tilde, params, pbar);
}

double default_dt(const EpidemicParams& params, double max_weighted_degree) {
  return 0.01 / std::max(params.beta * max_weighted_degree, params.delta);
}

Trajectory integrate_full(const WeightedAdjacency& aw,
                          const EpidemicParams& params,
                          const Eigen::VectorXd& p0, double t_end, double dt,
                          double sample_interval) {
  params.validate();
  if (p0.size() != aw.n_nodes())
    throw std::invalid_argument("initial state has wrong dimension");
  const double dmax = aw.max_row_sum();
  IntegrationOptions opts;
  opts.t_end = t_end;
  opts.dt = dt > 0.0 ? dt : default_dt(params, dmax);
  opts.sample_interval = sample_interval;
  opts.rate_bound = params.beta * dmax + params.delta;
  return integrate(
      [&](const Eigen::VectorXd& x) { return full_rhs(aw, params, x); }, p0,
      opts, SystemKind::full);
}

Trajectory integrate_reduced(const QuotientModel& qm,
                             const EpidemicParams& params,
                             const Eigen::VectorXd& pbar0, double t_end,
                             double dt, double sample_interval) {
  params.validate();
  if (pbar0.size() != qm.n_cells())
    throw std::invalid_argument("initial state has wrong dimension");
  const double dmax = qm.Q_tilde.rowwise().sum().maxCoeff();
  IntegrationOptions opts;
  opts.t_end = t_end;
  opts.dt = dt > 0.0 ? dt : default_dt(params, dmax);
  opts.sample_interval = sample_interval;
  opts.rate_bound = params.beta * dmax + params.delta;
  return integrate(
      [&](const Eigen::VectorXd& x) { return reduced_rhs(qm, params, x); },
      pbar0, opts, SystemKind::reduced);
}

Eigen::VectorXd lift(const Eigen::VectorXd& pbar, const Partition& partition) {
  if (pbar.size() != partition.n_cells())
    throw std::invalid_argument("cell vector has wrong dimension");
  Eigen::VectorXd p(partition.n_nodes());
  for (int v = 0; v < partition.n_nodes(); ++v) p[v] = pbar[partition.cell_of(v)];
  return p;
}

Eigen::VectorXd cell_average(const Eigen::VectorXd& p,
                             const Partition& partition) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(partition.n_cells());
  for (int v = 0; v < partition.n_nodes(); ++v) out[partition.cell_of(v)] += p[v];
  return out.cwiseQuotient(partition.sizes().cast<double>());
}

double within_cell_spread(const Eigen::VectorXd& p, const Partition& partition) {
  double spread = 0.0;
  for (const auto& cell : partition.cells()) {
    auto [lo, hi] = std::minmax_element(
        cell.begin(), cell.end(), [&](int a, int b) { return p[a] < p[b]; });
    spread = std::max(spread, p[*hi] - p[*lo]);
  }
  return spread;
}

Eigen::VectorXd infection_pressure(const QuotientModel& qm,
                                   const Eigen::VectorXd& x) {
  return qm.Q_tilde * x;
}

Eigen::VectorXd infection_pressure_complement(const QuotientModel& qm,
                                              const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = steady_state_bound(qm, {1.0, 1.0, qm.epsilon}).r;
  return r - qm.Q_tilde * (Eigen::VectorXd::Ones(x.size()) - x);
}

SteadyState steady_state_reduced(const QuotientModel& qm,
                                 const EpidemicParams& params,
                                 const FixedPointOptions& opts) {
  params.validate();
  const double lambda1 = spectral_radius(qm.Q).lambda1;
  return fixed_point(
      [&](const Eigen::VectorXd& x) { return infection_pressure(qm, x); },
      qm.n_cells(), params.tau(), lambda1, opts);
}

SteadyState steady_state_full(const WeightedAdjacency& aw,
                              const EpidemicParams& params,
                              const FixedPointOptions& opts) {
  params.validate();
  const double lambda1 = spectral_radius(aw.matrix).lambda1;
  return fixed_point(
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return aw.matrix * x; },
      aw.n_nodes(), params.tau(), lambda1, opts);
}

double equilibrium_residual(const WeightedAdjacency& aw,
                            const EpidemicParams& params,
                            const Eigen::VectorXd& p) {
  const Eigen::VectorXd ap = aw.matrix * p;
  const Eigen::VectorXd rhs =
      params.tau() *
      (Eigen::VectorXd::Ones(p.size()) - p).cwiseProduct(ap);
  return (p - rhs).lpNorm<Eigen::Infinity>();
}

SteadyStateBound steady_state_bound(const QuotientModel& qm,
                                    const EpidemicParams& params) {
  const int n = qm.n_cells();
  SteadyStateBound b;
  b.r.resize(n);
  for (int j = 0; j < n; ++j) {
    double cross = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == j) continue;
      // (k_j/k_m)^{-1/2} sqrt(d_jm d_mj) reduces to d_jm
      cross += std::sqrt(static_cast<double>(qm.sizes[m]) / qm.sizes[j]) *
               std::sqrt(static_cast<double>(qm.d(j, m)) * qm.d(m, j));
    }
    b.r[j] = qm.d(j, j) + qm.epsilon * cross;
  }
  b.upper = Eigen::VectorXd::Ones(n) -
            (Eigen::VectorXd::Ones(n) + params.tau() * b.r).cwiseInverse();
  return b;
}

FractionApprox avg_fraction_approx(const QuotientModel& qm,
                                   const EpidemicParams& params) {
  const Eigen::VectorXd r = steady_state_bound(qm, params).r;
  FractionApprox out;
  double sum = 0.0;
  for (int j = 0; j < qm.n_cells(); ++j) sum += qm.sizes[j] / r[j];
  out.y = 1.0 - sum / (params.tau() * qm.n_nodes());
  std::vector<double> sorted(r.data(), r.data() + r.size());
  std::sort(sorted.begin(), sorted.end());
  out.r1 = sorted.front();
  out.r2 = sorted.size() > 1 ? sorted[1] : sorted.front();
  return out;
}

double infected_fraction(const QuotientModel& qm, const Eigen::VectorXd& pbar) {
  return qm.sizes.cast<double>().dot(pbar) / qm.n_nodes();
}

ContractionReport cell_contraction_check(const Trajectory& trajectory,
                                         const Partition& partition,
                                         const EpidemicParams& params,
                                         double tolerance) {
  if (trajectory.kind != SystemKind::full ||
      trajectory.states.cols() != partition.n_nodes())
    throw std::invalid_argument("contraction check needs a full trajectory");
  ContractionReport report;
  const Eigen::VectorXd p0 = trajectory.at(0);
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    const double decay = std::exp(-params.delta * trajectory.times[s]);
    double spread = 0.0;
    for (const auto& cell : partition.cells())
      for (std::size_t a = 0; a < cell.size(); ++a)
        for (std::size_t b = a + 1; b < cell.size(); ++b) {
          const double gap =
              std::abs(trajectory.states(s, cell[a]) - trajectory.states(s, cell[b]));
          const double envelope = std::abs(p0[cell[a]] - p0[cell[b]]) * decay;
          spread = std::max(spread, gap);
          const double excess = gap - envelope;
          report.max_excess = std::max(report.max_excess, excess);
          if (excess > tolerance) report.envelope_holds = false;
        }
    report.max_spread.push_back(spread);
  }
  return report;
}

}  // namespace qsis
