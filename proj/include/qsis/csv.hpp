#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsis/nimfa.hpp"
#include "qsis/sis_sim.hpp"

namespace qsis::csv {

// Shortest round-trip-stable text used by every CSV writer (%.12g).
std::string number(double x);

// Header "t,p_1,...,p_dim".
void write_trajectory(std::ostream& out, const Trajectory& traj);
// Header "t,<prefix>_1_mean,<prefix>_1_se,...,survivors".
void write_ensemble(std::ostream& out, const EnsembleStats& stats,
                    const std::string& prefix = "cell");
// Plain matrix, one row per line.
template <typename Derived>
void write_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m);
// "quantity,value" row.
void write_row(std::ostream& out, const std::string& key, double value);

void write_rows(std::ostream& out, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace qsis::csv

#include <ostream>

namespace qsis::csv {

template <typename Derived>
void write_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << number(static_cast<double>(m(i, j)));
    }
    out << '\n';
  }
}

}  // namespace qsis::csv
