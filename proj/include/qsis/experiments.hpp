#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qsis {

// Scripted desk-scale runs over the bundled topologies.
//   fig2, fig3     four-cell example below / above threshold, NIMFA vs simulation
//   completo2      80-node path of cliques, NIMFA vs simulation
//   averaged       full system from unequal starts in one cell vs reduced system
//   low            Weyl lower bound vs threshold for the 40-ring family
//   ae_bound       almost-equitable bound as chords are added to 25-node rings
//   frac           approximate vs exact steady-state infected fraction
//   sis_k_sweep    simulated vs NIMFA steady fraction on 10-regular clique graphs
struct ExperimentSpec {
  std::string id;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<int> runs;
  std::optional<double> t_max;
  std::uint64_t seed = 20150601;
  // Replaces the default sweep values: tau multiples for frac, k for low and
  // sis_k_sweep, chord counts for ae_bound, tau values for sis_k_sweep go in
  // `sweep_tau`.
  std::vector<double> sweep;
  std::vector<double> sweep_tau;
  std::filesystem::path out_dir = ".";
  unsigned workers = 0;
};

struct ExperimentCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  std::vector<ExperimentCheck> checks;
  bool passed() const;
};

const std::vector<std::string>& experiment_ids();

// Writes trajectory.csv / ensemble.csv / sweep.csv as applicable plus
// summary.txt into spec.out_dir. Throws std::invalid_argument on an unknown
// id or bad override.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace qsis
