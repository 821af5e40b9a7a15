#pragma once

#include <cmath>
#include <optional>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qsis/partitions.hpp"

namespace qsis {

struct PowerIterationOptions {
  double tol = 1e-12;  // on ||M v - lambda v||_inf
  int max_iter = 100000;
};

template <typename Scalar>
struct BasicSpectralResult {
  Scalar lambda1 = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigvec;  // unit 2-norm, >= 0
  int iterations = 0;
  Scalar residual = 0;
  bool converged = false;
};

using SpectralResult = BasicSpectralResult<double>;

// Spectral radius and Perron vector of a symmetric nonnegative matrix (dense
// or sparse) by power iteration on M + cI, c = max row sum, started from the
// all-ones vector. The shift keeps -lambda_1 (bipartite structure) from
// competing with lambda_1. For reducible M the vector may not be unique; the
// eigenvalue still is. The zero matrix yields lambda1 = 0 immediately.
template <typename MatrixType>
BasicSpectralResult<typename MatrixType::Scalar> spectral_radius(
    const MatrixType& m, const PowerIterationOptions& opts = {}) {
  using Scalar = typename MatrixType::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = m.rows();

  BasicSpectralResult<Scalar> out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<Scalar>(n));
  Vector w = m * v;
  const Scalar shift = (m * Vector::Ones(n)).maxCoeff();
  if (shift == Scalar(0)) {
    out.eigvec = v;
    out.converged = true;
    return out;
  }
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Scalar lambda = v.dot(w);
    const Scalar residual = (w - lambda * v).template lpNorm<Eigen::Infinity>();
    out.lambda1 = lambda;
    out.residual = residual;
    out.iterations = it;
    out.eigvec = v;
    if (residual <= static_cast<Scalar>(opts.tol)) {
      out.converged = true;
      break;
    }
    v = w + shift * v;
    v.normalize();
    w = m * v;
  }
  out.eigvec = out.eigvec.cwiseMax(Scalar(0));
  out.eigvec.normalize();
  return out;
}

// tau_c = 1 / lambda_1; +inf for an edgeless graph.
inline double threshold(double lambda1) {
  return lambda1 > 0.0 ? 1.0 / lambda1 : INFINITY;
}

struct ThresholdBounds {
  double lambda1 = 0;
  double tau_c = 0;
  double tau_star = 0;
  std::optional<double> exact_homogeneous;
  std::optional<double> almost_equitable_lower;
};

// min_i 1/(d_ii + lambda_1(B_hat)) with B_hat the off-diagonal part of Q.
double weyl_lower_bound(const QuotientModel& qm,
                        const PowerIterationOptions& opts = {});

// d + c*eps*lambda_1(B) when every cell has the same size, the same internal
// degree d and every linked pair shares one cross degree c (c = k for fully
// joined cells); empty otherwise.
std::optional<double> homogeneous_lambda1(const QuotientModel& qm,
                                          const PowerIterationOptions& opts = {});

ThresholdBounds threshold_bounds(const QuotientModel& qm,
                                 const PowerIterationOptions& opts = {});

// Upper bound on lambda_1 of one cell's perturbation block: the minimum of
// sqrt(2e(k-1)/k), Delta, and sqrt(2e-k'+1) when G^C is connected.
double cell_perturbation_bound(const CellPerturbation& cell);

// max_i cell_perturbation_bound(cell_i); 0 when nothing changed.
double perturbation_bound(const PerturbationReport& report);

// 1 / (max_i lambda_1(C_i) + lambda_1(B_hat) + pert_bound), with lambda_1(C_i)
// the internal spectral radii of the unperturbed cells.
double almost_equitable_lower_bound(const QuotientModel& qm,
                                    std::span<const double> lambda1_cells,
                                    double pert_bound,
                                    const PowerIterationOptions& opts = {});

// Dispatches on the perturbation direction: additions use the bound above
// with lambda_1(C_i) = d_ii; deletions keep the equitable Weyl bound.
double almost_equitable_lower_bound(const QuotientModel& base,
                                    const PerturbationReport& report,
                                    const PowerIterationOptions& opts = {});

}  // namespace qsis
