#include "qsis/sis_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

#include "qsis/error.hpp"

namespace qsis {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs body(r) for r in [0, count) on `workers` threads.
void parallel_for(int count, unsigned workers,
                  const std::function<void(int, unsigned)>& body) {
  workers = std::max(1u, std::min<unsigned>(workers, std::max(count, 1)));
  std::atomic<int> next{0};
  auto loop = [&](unsigned worker) {
    for (int r = next++; r < count; r = next++) body(r, worker);
  };
  if (workers == 1) {
    loop(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop, w);
  for (auto& t : pool) t.join();
}

void check_init(const WeightedAdjacency& aw, std::span<const int> init) {
  for (int v : init)
    if (v < 0 || v >= aw.n_nodes())
      throw std::invalid_argument("initially infected node " +
                                  std::to_string(v) + " out of range");
}

}  // namespace

std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(replica + 1));
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QSIS_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SisProcess::SisProcess(const WeightedAdjacency& aw, const EpidemicParams& params,
                       std::span<const int> initially_infected,
                       std::uint64_t seed)
    : aw_(&aw), params_(params), rng_(seed) {
  // beta = 0 is allowed here: a chain without infections is still well defined.
  if (!(params.beta >= 0.0) || !(params.delta > 0.0))
    throw std::invalid_argument("need beta >= 0 and delta > 0");
  check_init(aw, initially_infected);
  const int n = aw.n_nodes();
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) {
    offsets_[v + 1] = offsets_[v];
    for (SparseMatrix::InnerIterator it(aw.matrix, v); it; ++it)
      if (it.value() != 0.0 && it.row() != v) {
        neighbors_.push_back(static_cast<int>(it.row()));
        same_cell_.push_back(aw.intra(v, static_cast<int>(it.row())));
        ++offsets_[v + 1];
      }
  }
  intra_count_.assign(n, 0);
  inter_count_.assign(n, 0);
  while (leaves_ < static_cast<std::size_t>(std::max(n, 1))) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
  state_.infected.assign(n, 0);
  for (int v : initially_infected)
    if (!state_.infected[v]) set_infected(v, true);
}

double SisProcess::node_rate(int v) const {
  if (state_.infected[v]) return params_.delta;
  return params_.beta * (intra_count_[v] + aw_->epsilon * inter_count_[v]);
}

void SisProcess::update_leaf(int v) {
  std::size_t i = leaves_ + static_cast<std::size_t>(v);
  tree_[i] = node_rate(v);
  for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void SisProcess::set_infected(int v, bool value) {
  state_.infected[v] = value;
  state_.n_infected += value ? 1 : -1;
  const int delta = value ? 1 : -1;
  for (int e = offsets_[v]; e < offsets_[v + 1]; ++e) {
    const int w = neighbors_[e];
    (same_cell_[e] ? intra_count_[w] : inter_count_[w]) += delta;
    update_leaf(w);
  }
  update_leaf(v);
}

double SisProcess::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double SisProcess::recompute_total_rate() const {
  double total = 0.0;
  for (int v = 0; v < aw_->n_nodes(); ++v) {
    if (state_.infected[v]) {
      total += params_.delta;
      continue;
    }
    double pressure = 0.0;
    for (SparseMatrix::InnerIterator it(aw_->matrix, v); it; ++it)
      if (state_.infected[it.row()]) pressure += it.value();
    total += params_.beta * pressure;
  }
  return total;
}

double SisProcess::next_event_time() {
  if (pending_ < 0.0) {
    const double rate = total_rate();
    pending_ = rate > 0.0 ? state_.t - std::log1p(-uniform()) / rate : INFINITY;
  }
  return pending_;
}

SimEvent SisProcess::fire() {
  const double t = next_event_time();
  if (!std::isfinite(t)) throw std::logic_error("fire() on an absorbed process");
  double target = uniform() * total_rate();
  std::size_t i = 1;
  while (i < leaves_) {
    const std::size_t l = 2 * i;
    if (tree_[l + 1] <= 0.0 || (target < tree_[l] && tree_[l] > 0.0)) {
      i = l;
    } else {
      target -= tree_[l];
      i = l + 1;
    }
  }
  const int v = static_cast<int>(i - leaves_);
  const bool infection = !state_.infected[v];
  set_infected(v, infection);
  state_.t = t;
  ++state_.events;
  pending_ = -1.0;
  return {t, v, infection};
}

namespace {

// Drives `process` across `grid`, calling on_sample(g) at each grid index and
// on_event(ev) after each event.
template <typename OnSample, typename OnEvent>
void drive(SisProcess& process, std::span<const double> grid,
           const RunOptions& opts, OnSample&& on_sample, OnEvent&& on_event) {
  std::size_t g = 0;
  while (g < grid.size()) {
    const double t_next = process.next_event_time();
    while (g < grid.size() && grid[g] < t_next) on_sample(g++);
    if (g == grid.size()) break;
    const SimEvent ev = process.fire();
    on_event(ev);
    if (opts.check_every > 0 && process.state().events % opts.check_every == 0) {
      const double maintained = process.total_rate();
      const double fresh = process.recompute_total_rate();
      if (std::abs(maintained - fresh) > 1e-9 * std::max(1.0, fresh))
        throw InvariantViolation("rate accounting drifted: " +
                                 std::to_string(maintained) + " vs " +
                                 std::to_string(fresh));
    }
  }
}

}  // namespace

std::vector<double> time_grid(double t_max, double step) {
  if (!(step > 0.0) || !(t_max >= 0.0))
    throw std::invalid_argument("grid needs step > 0 and t_max >= 0");
  const long n = static_cast<long>(std::floor(t_max / step + 1e-9));
  std::vector<double> grid(n + 1);
  for (long i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) * step;
  return grid;
}

SamplePath simulate_run(const WeightedAdjacency& aw,
                        const EpidemicParams& params,
                        std::span<const int> initially_infected,
                        std::span<const double> grid, std::uint64_t seed,
                        const RunOptions& opts) {
  SisProcess process(aw, params, initially_infected, seed);
  SamplePath path;
  path.grid.assign(grid.begin(), grid.end());
  path.states.reserve(grid.size());
  if (process.absorbed()) path.absorption_time = 0.0;
  drive(
      process, grid, opts,
      [&](std::size_t) { path.states.push_back(process.state().infected); },
      [&](const SimEvent& ev) {
        if (opts.record_events) path.log.push_back(ev);
        if (process.absorbed()) path.absorption_time = ev.t;
      });
  path.events = process.state().events;
  return path;
}

EnsembleStats ensemble(const WeightedAdjacency& aw,
                       const EpidemicParams& params,
                       std::span<const int> initially_infected,
                       std::span<const double> grid, const Partition& groups,
                       int runs, std::uint64_t master_seed, unsigned workers) {
  if (runs < 1) throw std::invalid_argument("ensemble needs runs >= 1");
  if (groups.n_nodes() != aw.n_nodes())
    throw std::invalid_argument("grouping does not match the graph");
  check_init(aw, initially_infected);
  const std::size_t n_grid = grid.size();
  const int n_groups = groups.n_cells();
  workers = resolve_workers(workers);

  struct Accumulator {
    std::vector<std::int64_t> sum, sum_sq;
    std::vector<int> alive;
  };
  std::vector<Accumulator> acc(workers);
  for (auto& a : acc) {
    a.sum.assign(n_grid * n_groups, 0);
    a.sum_sq.assign(n_grid * n_groups, 0);
    a.alive.assign(n_grid, 0);
  }

  parallel_for(runs, workers, [&](int r, unsigned w) {
    SisProcess process(aw, params, initially_infected, replica_seed(master_seed, r));
    std::vector<std::int64_t> count(n_groups, 0);
    for (int v = 0; v < aw.n_nodes(); ++v)
      if (process.state().infected[v]) ++count[groups.cell_of(v)];
    auto& a = acc[w];
    drive(
        process, grid, RunOptions{},
        [&](std::size_t g) {
          for (int c = 0; c < n_groups; ++c) {
            a.sum[g * n_groups + c] += count[c];
            a.sum_sq[g * n_groups + c] += count[c] * count[c];
          }
          if (!process.absorbed()) ++a.alive[g];
        },
        [&](const SimEvent& ev) {
          count[groups.cell_of(ev.node)] += ev.infection ? 1 : -1;
        });
  });

  EnsembleStats stats;
  stats.grid.assign(grid.begin(), grid.end());
  stats.runs = runs;
  stats.mean.resize(n_grid, n_groups);
  stats.se.resize(n_grid, n_groups);
  stats.survivors.assign(n_grid, 0);
  const double R = runs;
  for (std::size_t g = 0; g < n_grid; ++g) {
    for (const auto& a : acc) stats.survivors[g] += a.alive[g];
    for (int c = 0; c < n_groups; ++c) {
      std::int64_t s1 = 0, s2 = 0;
      for (const auto& a : acc) {
        s1 += a.sum[g * n_groups + c];
        s2 += a.sum_sq[g * n_groups + c];
      }
      const double k = groups.size(c);
      stats.mean(g, c) = static_cast<double>(s1) / (R * k);
      double var = 0.0;
      if (runs > 1) {
        const double centered = static_cast<double>(s2) -
                                static_cast<double>(s1) * static_cast<double>(s1) / R;
        var = std::max(0.0, centered) / (R - 1.0) / (k * k);
      }
      stats.se(g, c) = std::sqrt(var / R);
    }
  }
  return stats;
}

SteadyFraction steady_fraction(const WeightedAdjacency& aw,
                               const EpidemicParams& params, double t_burn,
                               double t_window, int runs,
                               std::uint64_t master_seed, unsigned workers) {
  if (runs < 1) throw std::invalid_argument("steady_fraction needs runs >= 1");
  params.validate();
  if (!(t_burn > 0.0)) t_burn = 10.0 / params.delta;
  if (!(t_window > 0.0)) t_window = 40.0 / params.delta;
  const double t_end = t_burn + t_window;
  const int n = aw.n_nodes();
  std::vector<int> everyone(n);
  for (int v = 0; v < n; ++v) everyone[v] = v;

  std::vector<double> average(runs, 0.0);
  std::vector<std::uint8_t> survived(runs, 0);
  parallel_for(runs, resolve_workers(workers), [&](int r, unsigned) {
    SisProcess process(aw, params, everyone, replica_seed(master_seed, r));
    double area = 0.0;
    double t_prev = 0.0;
    while (true) {
      const double t_next = std::min(process.next_event_time(), t_end);
      const double lo = std::max(t_prev, t_burn);
      if (t_next > lo) area += process.state().n_infected * (t_next - lo);
      if (t_next >= t_end) break;
      process.fire();
      t_prev = t_next;
    }
    average[r] = area / (t_window * n);
    survived[r] = !process.absorbed();
  });

  SteadyFraction out;
  out.runs = runs;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r)
    if (survived[r]) {
      ++out.survivors;
      s1 += average[r];
      s2 += average[r] * average[r];
    }
  if (out.survivors == 0) {
    out.flagged = true;
    return out;
  }
  const double m = out.survivors;
  out.mean = s1 / m;
  if (out.survivors > 1)
    out.se = std::sqrt(std::max(0.0, (s2 - s1 * s1 / m) / (m - 1.0)) / m);
  return out;
}

}  // namespace qsis
