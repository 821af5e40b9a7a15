#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsis/error.hpp"
#include "qsis/graph.hpp"
#include "qsis/partitions.hpp"

namespace qsis {

struct EpidemicParams {
  double beta = 1.0;     // infection rate
  double delta = 1.0;    // curing rate
  double epsilon = 1.0;  // inter-community factor

  double tau() const { return beta / delta; }
  // Throws std::invalid_argument unless all rates are positive.
  void validate() const;
};

enum class SystemKind { full, reduced };

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // one row per time
  SystemKind kind = SystemKind::full;

  Eigen::VectorXd at(std::size_t i) const { return states.row(i).transpose(); }
  Eigen::VectorXd final_state() const { return at(times.size() - 1); }
};

struct SteadyState {
  Eigen::VectorXd p_inf;
  double residual = 0;  // ||p - F(p)||_inf of the fixed-point map
  int iterations = 0;
  bool below_threshold = false;
  bool converged = false;
};

// dP/dt = beta (1 - P) .* (A P) - delta P, for any (weighted) adjacency.
template <typename MatrixType, typename Derived>
Eigen::VectorXd nimfa_rhs(const MatrixType& a, const EpidemicParams& params,
                          const Eigen::MatrixBase<Derived>& p) {
  Eigen::VectorXd pressure = a * p;
  return params.beta * (Eigen::VectorXd::Ones(p.size()) - p)
                           .cwiseProduct(pressure) -
         params.delta * p;
}

// Full N-dimensional mean-field system on the weighted adjacency.
Eigen::VectorXd full_rhs(const WeightedAdjacency& aw,
                         const EpidemicParams& params, const Eigen::VectorXd& p);

// Reduced n-dimensional system driven by Q_tilde.
Eigen::VectorXd reduced_rhs(const QuotientModel& qm,
                            const EpidemicParams& params,
                            const Eigen::VectorXd& pbar);

struct IntegrationOptions {
  double t_end = 1.0;
  double dt = 1e-2;
  // Spacing of recorded states; 0 records every step. Rounded to a whole
  // number of steps.
  double sample_interval = 0.0;
  // beta*max_degree + delta; when > 0, dt must not exceed 0.1 / rate_bound.
  double rate_bound = 0.0;
};

inline constexpr double kCubeSlack = 1e-9;

// Classical fixed-step RK4. The step is shrunk so that t_end is hit exactly.
// Any state outside [-1e-9, 1 + 1e-9] or NaN raises InvariantViolation.
template <typename Rhs>
Trajectory integrate(Rhs&& rhs, const Eigen::VectorXd& x0,
                     const IntegrationOptions& opts,
                     SystemKind kind = SystemKind::full) {
  if (!(opts.t_end > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("t_end and dt must be positive");
  if (opts.rate_bound > 0.0 && opts.dt * opts.rate_bound > 0.1 + 1e-12)
    throw std::invalid_argument(
        "dt exceeds the stability guard 0.1/(beta*max_degree + delta)");
  long steps = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
  long stride = 1;
  if (opts.sample_interval > 0.0) {
    // When t_end is a whole number of sample intervals, shrink the step so
    // that every sample lands on the grid exactly.
    const double samples = opts.t_end / opts.sample_interval;
    const long whole = std::lround(samples);
    if (whole >= 1 && std::abs(samples - static_cast<double>(whole)) < 1e-9) {
      stride = static_cast<long>(
          std::ceil(opts.sample_interval / opts.dt - 1e-9));
      steps = whole * stride;
    } else {
      stride = std::max(
          1L, std::lround(opts.sample_interval * static_cast<double>(steps) /
                          opts.t_end));
    }
  }
  const double h = opts.t_end / static_cast<double>(steps);

  auto check = [&](const Eigen::VectorXd& x, double t) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!(x[i] >= -kCubeSlack && x[i] <= 1.0 + kCubeSlack))
        throw InvariantViolation(
            "state left [0,1] at t=" + std::to_string(t) + " (component " +
            std::to_string(i) + " = " + std::to_string(x[i]) +
            "); reduce dt");
  };

  check(x0, 0.0);
  Trajectory traj;
  traj.kind = kind;
  const long n_samples = steps / stride + 1 + (steps % stride != 0);
  traj.states.resize(n_samples, x0.size());
  traj.times.reserve(n_samples);
  traj.times.push_back(0.0);
  traj.states.row(0) = x0.transpose();

  Eigen::VectorXd x = x0;
  for (long s = 1; s <= steps; ++s) {
    const Eigen::VectorXd k1 = rhs(x);
    const Eigen::VectorXd k2 = rhs((x + 0.5 * h * k1).eval());
    const Eigen::VectorXd k3 = rhs((x + 0.5 * h * k2).eval());
    const Eigen::VectorXd k4 = rhs((x + h * k3).eval());
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = s == steps ? opts.t_end : static_cast<double>(s) * opts.t_end / static_cast<double>(steps);
    check(x, t);
    if (s % stride == 0 || s == steps) {
      traj.states.row(traj.times.size()) = x.transpose();
      traj.times.push_back(t);
    }
  }
  return traj;
}

// Default step 0.01 / max(beta * max_degree, delta).
double default_dt(const EpidemicParams& params, double max_weighted_degree);

Trajectory integrate_full(const WeightedAdjacency& aw,
                          const EpidemicParams& params,
                          const Eigen::VectorXd& p0, double t_end,
                          double dt = 0.0, double sample_interval = 0.0);
Trajectory integrate_reduced(const QuotientModel& qm,
                             const EpidemicParams& params,
                             const Eigen::VectorXd& pbar0, double t_end,
                             double dt = 0.0, double sample_interval = 0.0);

// Cell-constant embedding: node v of cell j receives pbar[j].
Eigen::VectorXd lift(const Eigen::VectorXd& pbar, const Partition& partition);
// Per-cell mean of a node vector.
Eigen::VectorXd cell_average(const Eigen::VectorXd& p,
                             const Partition& partition);
// Largest within-cell max-min gap.
double within_cell_spread(const Eigen::VectorXd& p, const Partition& partition);

struct FixedPointOptions {
  double tol = 1e-13;  // on the sup-norm change between iterates
  int max_iter = 1000000;
};

// g(x) = Q_tilde x, the expected infection pressure on a node of each cell.
Eigen::VectorXd infection_pressure(const QuotientModel& qm,
                                   const Eigen::VectorXd& x);
// Same quantity written as r - Q_tilde (1 - x).
Eigen::VectorXd infection_pressure_complement(const QuotientModel& qm,
                                              const Eigen::VectorXd& x);

// Iterates x <- 1 - 1/(1 + tau g(x)) from the all-ones vector; returns the
// zero vector without iterating when tau <= 1/lambda_1(Q).
SteadyState steady_state_reduced(const QuotientModel& qm,
                                 const EpidemicParams& params,
                                 const FixedPointOptions& opts = {});
// Node-level version: p_i <- 1 - 1/(1 + tau sum_j w_ij p_j).
SteadyState steady_state_full(const WeightedAdjacency& aw,
                              const EpidemicParams& params,
                              const FixedPointOptions& opts = {});

// ||P - tau (I - diag P) A P||_inf, residual of the equilibrium equation.
double equilibrium_residual(const WeightedAdjacency& aw,
                            const EpidemicParams& params,
                            const Eigen::VectorXd& p);

struct SteadyStateBound {
  Eigen::VectorXd r;      // d_jj + eps * sum_{m != j} d_jm (row sums of Q_tilde)
  Eigen::VectorXd upper;  // 1 - 1/(1 + tau r_j)
};

SteadyStateBound steady_state_bound(const QuotientModel& qm,
                                    const EpidemicParams& params);

struct FractionApprox {
  double y = 0;   // 1 - (1/(tau N)) sum_j k_j / r_j
  double r1 = 0;  // smallest r_j
  double r2 = 0;  // second smallest r_j (equal to r1 when it repeats)
};

FractionApprox avg_fraction_approx(const QuotientModel& qm,
                                   const EpidemicParams& params);

// (1/N) sum_j k_j pbar_j.
double infected_fraction(const QuotientModel& qm, const Eigen::VectorXd& pbar);

struct ContractionReport {
  bool envelope_holds = true;
  double max_excess = 0;            // worst |p_h - p_w| - envelope
  std::vector<double> max_spread;   // largest same-cell gap per recorded time
};

// Checks |p_h(t) - p_w(t)| <= |p_h(0) - p_w(0)| e^{-delta t} + tolerance for
// every same-cell pair of a full trajectory. The envelope is guaranteed when
// cells are cliques and cross links join whole cells; elsewhere only the
// spread itself is meaningful.
ContractionReport cell_contraction_check(const Trajectory& trajectory,
                                         const Partition& partition,
                                         const EpidemicParams& params,
                                         double tolerance = 1e-9);

}  // namespace qsis
