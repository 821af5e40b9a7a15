#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsis/graph.hpp"
#include "qsis/nimfa.hpp"

namespace qsis {

// Per-replica seed derived from (master seed, replica index).
std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica);

// Worker threads for ensembles: `requested` when > 0, else the QSIS_WORKERS
// environment variable, else the hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

struct SimState {
  std::vector<std::uint8_t> infected;
  int n_infected = 0;
  double t = 0.0;
  std::uint64_t events = 0;
};

struct SimEvent {
  double t = 0.0;
  int node = -1;
  bool infection = false;
};

// Exact continuous-time SIS chain on a weighted adjacency (direct stochastic
// simulation). Node rates are kept in a binary sum tree; the infection
// pressure on each node is tracked as integer counts of infected intra- and
// inter-cell neighbours, so the total rate never drifts.
class SisProcess {
 public:
  SisProcess(const WeightedAdjacency& aw, const EpidemicParams& params,
             std::span<const int> initially_infected, std::uint64_t seed);

  const SimState& state() const { return state_; }
  bool absorbed() const { return state_.n_infected == 0; }
  double total_rate() const { return tree_[1]; }
  // Sum of all transition rates recomputed from the infected set.
  double recompute_total_rate() const;

  // Time of the next event (absorbed processes return +inf). Repeated calls
  // return the same value until fire() is called.
  double next_event_time();
  // Applies the pending event and advances the clock.
  SimEvent fire();

 private:
  double node_rate(int v) const;
  void update_leaf(int v);
  void set_infected(int v, bool value);
  double uniform();

  const WeightedAdjacency* aw_;
  EpidemicParams params_;
  std::vector<int> offsets_, neighbors_;
  std::vector<std::uint8_t> same_cell_;
  std::vector<int> intra_count_, inter_count_;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;
  SimState state_;
  std::mt19937_64 rng_;
  double pending_ = -1.0;
};

struct RunOptions {
  bool record_events = false;
  // Compare the maintained total rate with a recomputation every
  // `check_every` events; mismatches beyond 1e-9 throw InvariantViolation.
  int check_every = 0;
};

struct SamplePath {
  std::vector<double> grid;
  std::vector<std::vector<std::uint8_t>> states;  // infected flags per grid time
  std::uint64_t events = 0;
  double absorption_time = INFINITY;
  std::vector<SimEvent> log;
};

// One replica sampled at the given (increasing) grid times. The state at a
// grid time t is the state just after every event with time <= t.
SamplePath simulate_run(const WeightedAdjacency& aw,
                        const EpidemicParams& params,
                        std::span<const int> initially_infected,
                        std::span<const double> grid, std::uint64_t seed,
                        const RunOptions& opts = {});

// Regular grid 0, step, 2 step, ... up to t_max inclusive.
std::vector<double> time_grid(double t_max, double step);

struct EnsembleStats {
  std::vector<double> grid;
  Eigen::MatrixXd mean;  // grid x groups, mean infected fraction per group
  Eigen::MatrixXd se;    // sample std / sqrt(runs)
  int runs = 0;
  std::vector<int> survivors;  // replicas with at least one infected node
};

// Replica r uses replica_seed(master_seed, r). Group statistics are
// accumulated as integer counts, so the result does not depend on the worker
// count or scheduling.
EnsembleStats ensemble(const WeightedAdjacency& aw,
                       const EpidemicParams& params,
                       std::span<const int> initially_infected,
                       std::span<const double> grid, const Partition& groups,
                       int runs, std::uint64_t master_seed,
                       unsigned workers = 0);

struct SteadyFraction {
  double mean = 0;  // over surviving replicas
  double se = 0;
  int survivors = 0;
  int runs = 0;
  bool flagged = false;  // no replica survived the window
};

// Starts every replica fully infected, time-averages the infected fraction
// over [t_burn, t_burn + t_window] and averages over replicas still alive at
// the end of the window. Non-positive t_burn / t_window pick 10/delta and
// 40/delta.
SteadyFraction steady_fraction(const WeightedAdjacency& aw,
                               const EpidemicParams& params, double t_burn,
                               double t_window, int runs,
                               std::uint64_t master_seed, unsigned workers = 0);

}  // namespace qsis
