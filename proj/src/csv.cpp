#include "qsis/csv.hpp"

#include <cstdio>
#include <ostream>

namespace qsis::csv {

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (Eigen::Index j = 0; j < traj.states.cols(); ++j) out << ",p_" << j + 1;
  out << '\n';
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    out << number(traj.times[s]);
    for (Eigen::Index j = 0; j < traj.states.cols(); ++j)
      out << ',' << number(traj.states(s, j));
    out << '\n';
  }
}

void write_ensemble(std::ostream& out, const EnsembleStats& stats,
                    const std::string& prefix) {
  out << 't';
  for (Eigen::Index c = 0; c < stats.mean.cols(); ++c)
    out << ',' << prefix << '_' << c + 1 << "_mean," << prefix << '_' << c + 1
        << "_se";
  out << ",survivors\n";
  for (std::size_t g = 0; g < stats.grid.size(); ++g) {
    out << number(stats.grid[g]);
    for (Eigen::Index c = 0; c < stats.mean.cols(); ++c)
      out << ',' << number(stats.mean(g, c)) << ',' << number(stats.se(g, c));
    out << ',' << stats.survivors[g] << '\n';
  }
}

void write_row(std::ostream& out, const std::string& key, double value) {
  out << key << ',' << number(value) << '\n';
}

void write_rows(std::ostream& out, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace qsis::csv
