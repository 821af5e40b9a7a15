#include "qsis/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qsis/catalog.hpp"
#include "qsis/community.hpp"
#include "qsis/csv.hpp"
#include "qsis/error.hpp"
#include "qsis/nimfa.hpp"
#include "qsis/partitions.hpp"
#include "qsis/sis_sim.hpp"
#include "qsis/spectral.hpp"

namespace qsis {

namespace {

namespace fs = std::filesystem;
using csv::number;

class Run {
 public:
  explicit Run(const ExperimentSpec& spec) : spec_(spec) {
    fs::create_directories(spec.out_dir);
    note("experiment", spec.id);
    note("seed", std::to_string(spec.seed));
  }

  void note(const std::string& key, const std::string& value) {
    summary_ << key << " = " << value << '\n';
  }
  void note(const std::string& key, double value) { note(key, number(value)); }

  void check(const std::string& name, bool passed, const std::string& detail) {
    result_.checks.push_back({name, passed, detail});
  }

  std::ofstream open(const std::string& name) {
    const fs::path path = spec_.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    result_.files.push_back(path);
    return out;
  }

  ExperimentResult finish() {
    for (const auto& c : result_.checks)
      summary_ << "check " << c.name << " = " << (c.passed ? "pass" : "fail")
               << " (" << c.detail << ")\n";
    open("summary.txt") << summary_.str();
    return std::move(result_);
  }

  const ExperimentSpec& spec() const { return spec_; }

 private:
  const ExperimentSpec& spec_;
  std::ostringstream summary_;
  ExperimentResult result_;
};

EpidemicParams params_with(const ExperimentSpec& spec, double beta,
                           double delta, double epsilon) {
  EpidemicParams p{spec.beta.value_or(beta), spec.delta.value_or(delta),
                   spec.epsilon.value_or(epsilon)};
  p.validate();
  return p;
}

void note_params(Run& run, const EpidemicParams& p) {
  run.note("beta", p.beta);
  run.note("delta", p.delta);
  run.note("epsilon", p.epsilon);
  run.note("tau", p.tau());
}

// dt dividing `step` and no larger than the default step.
double aligned_dt(const EpidemicParams& p, double max_degree, double step) {
  return step / std::ceil(step / default_dt(p, max_degree));
}

struct Dynamics {
  CommunitySpec topology;
  EpidemicParams params;
  std::vector<int> init;
  double t_max = 10.0;
  double step = 0.25;
  int runs = 10000;
  std::optional<std::pair<double, double>> expected_tau_c;  // value, tolerance
};

void run_dynamics(Run& run, const Dynamics& setup) {
  const auto& spec = run.spec();
  const auto cg = build_community_graph(setup.topology);
  const auto& params = setup.params;
  const auto aw = weighted_adjacency(cg.graph, cg.partition, params.epsilon);
  const auto qm = quotient_model(cg.graph, cg.partition, params.epsilon);
  const double tau_c = threshold(spectral_radius(qm.Q).lambda1);
  const double t_max = spec.t_max.value_or(setup.t_max);
  const int runs = spec.runs.value_or(setup.runs);

  note_params(run, params);
  run.note("nodes", std::to_string(cg.graph.n_nodes()));
  run.note("cells", std::to_string(cg.partition.n_cells()));
  run.note("runs", std::to_string(runs));
  run.note("t_max", t_max);
  run.note("grid_step", setup.step);
  run.note("tau_c", tau_c);

  if (setup.expected_tau_c) {
    const auto [value, tol] = *setup.expected_tau_c;
    run.check("threshold", std::abs(tau_c - value) <= tol,
              "tau_c=" + number(tau_c) + " expected " + number(value) + "+-" +
                  number(tol));
  }

  const auto grid = time_grid(t_max, setup.step);
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(cg.graph.n_nodes());
  for (int v : setup.init) p0[v] = 1.0;
  const Eigen::VectorXd pbar0 = cell_average(p0, cg.partition);
  const double dmax = qm.Q_tilde.rowwise().sum().maxCoeff();
  const auto traj =
      integrate_reduced(qm, params, pbar0, grid.back(),
                        aligned_dt(params, dmax, setup.step), setup.step);
  if (traj.times.size() != grid.size())
    throw std::logic_error("NIMFA samples do not line up with the grid");

  const auto stats = ensemble(aw, params, setup.init, grid, cg.partition, runs,
                              spec.seed, spec.workers);
  {
    auto out = run.open("trajectory.csv");
    csv::write_trajectory(out, traj);
  }
  {
    auto out = run.open("ensemble.csv");
    csv::write_ensemble(out, stats);
  }

  double worst = -INFINITY;
  std::string where;
  // t = 0 is deterministic and identical on both sides.
  for (std::size_t g = 1; g < grid.size(); ++g)
    for (int c = 0; c < qm.n_cells(); ++c) {
      const double excess =
          stats.mean(g, c) - traj.states(g, c) - 3.0 * stats.se(g, c);
      if (excess > worst) {
        worst = excess;
        where = "t=" + number(grid[g]) + " cell " + std::to_string(c + 1);
      }
    }
  run.check("nimfa_upper_bound", worst <= 0.0,
            "max(sim - nimfa - 3se)=" + number(worst) + " at " + where);

  if (params.tau() < tau_c) {
    bool decaying = true;
    for (int c = 0; c < qm.n_cells(); ++c)
      decaying &= traj.states(grid.size() - 1, c) <
                  traj.states.col(c).maxCoeff();
    run.check("decay", decaying,
              "every cell below its peak at t_max, max p=" +
                  number(traj.final_state().maxCoeff()));
  } else {
    const auto steady = steady_state_reduced(qm, params);
    const double gap = (traj.final_state() - steady.p_inf).lpNorm<Eigen::Infinity>();
    run.check("endemic", gap < 1e-3,
              "|p(t_max) - p_inf|=" + number(gap));
  }
}

void run_averaged(Run& run) {
  const auto& spec = run.spec();
  const auto cg = build_community_graph(catalog::four_cell_example());
  const double t_max = spec.t_max.value_or(30.0);
  const double step = 0.1;
  const int cell = 2;
  const std::vector<double> starts = {0.1, 0.3, 0.6, 0.9};
  const auto& members = cg.partition.cell(cell);

  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(cg.graph.n_nodes());
  p0[0] = 1.0;
  for (std::size_t a = 0; a < members.size(); ++a) p0[members[a]] = starts[a % starts.size()];
  const Eigen::VectorXd pbar0 = cell_average(p0, cg.partition);

  struct Regime {
    std::string name;
    EpidemicParams params;
  };
  const double eps = spec.epsilon.value_or(0.3);
  const std::vector<Regime> regimes = {{"below", {0.29, 1.0, eps}},
                                       {"above", {1.5, 0.3, eps}}};
  run.note("epsilon", eps);
  run.note("t_max", t_max);

  std::vector<std::string> header = {"t"};
  std::vector<Trajectory> columns_full, columns_reduced;
  for (const auto& r : regimes) {
    const auto aw = weighted_adjacency(cg.graph, cg.partition, r.params.epsilon);
    const auto qm = quotient_matrix(
        std::get<CellDegreeMatrix>(check_equitable(cg.graph, cg.partition)),
        cg.partition.sizes(), r.params.epsilon);
    const double dt = aligned_dt(r.params, aw.max_row_sum(), step);
    auto full = integrate_full(aw, r.params, p0, t_max, dt, step);
    auto reduced = integrate_reduced(qm, r.params, pbar0, t_max, dt, step);

    Trajectory within;
    within.kind = SystemKind::full;
    within.times = full.times;
    within.states = full.states;
    const auto report = cell_contraction_check(within, cg.partition, r.params);
    const double spread0 = report.max_spread.front();
    const double spread_end = report.max_spread.back();
    run.check(r.name + "_spread_decays", spread_end < 1e-2 * spread0,
              "spread " + number(spread0) + " -> " + number(spread_end));
    const double mean_end = full.final_state()(members).mean();
    const double gap = std::abs(mean_end - reduced.final_state()[cell]);
    run.check(r.name + "_approaches_reduced", gap < 1e-3,
              "|mean_V3(full) - reduced_V3| at t_max=" + number(gap));
    run.note(r.name + "_tau", r.params.tau());

    for (int v : members)
      header.push_back(r.name + "_node_" + std::to_string(v + 1));
    header.push_back(r.name + "_reduced_cell_" + std::to_string(cell + 1));
    columns_full.push_back(std::move(full));
    columns_reduced.push_back(std::move(reduced));
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < columns_full.front().times.size(); ++s) {
    std::vector<std::string> row = {number(columns_full.front().times[s])};
    for (std::size_t r = 0; r < regimes.size(); ++r) {
      for (int v : members) row.push_back(number(columns_full[r].states(s, v)));
      row.push_back(number(columns_reduced[r].states(s, cell)));
    }
    rows.push_back(std::move(row));
  }
  auto out = run.open("trajectory.csv");
  csv::write_rows(out, header, rows);
}

std::vector<int> int_sweep(const std::vector<double>& override_values,
                           std::vector<int> fallback) {
  if (override_values.empty()) return fallback;
  std::vector<int> out;
  for (double v : override_values) {
    if (v != std::floor(v)) throw std::invalid_argument("sweep expects integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void run_low(Run& run) {
  const auto& spec = run.spec();
  const double eps = spec.epsilon.value_or(0.3);
  std::vector<int> ks;
  for (int k = 3; k <= 30; ++k) ks.push_back(k);
  ks = int_sweep(spec.sweep, ks);
  run.note("epsilon", eps);
  run.note("cells", "40");
  run.note("cross_degree", "2");

  std::vector<std::vector<std::string>> rows;
  double worst = -INFINITY;
  for (int k : ks) {
    const auto cg = build_community_graph(catalog::ring_family(k));
    const auto qm = quotient_model(cg.graph, cg.partition, eps);
    const double tau_star = weyl_lower_bound(qm);
    const double tau_q = threshold(spectral_radius(qm.Q).lambda1);
    const auto aw = weighted_adjacency(cg.graph, cg.partition, eps);
    const double tau_full = threshold(spectral_radius(aw.matrix).lambda1);
    worst = std::max(worst, tau_star / tau_full - 1.0);
    rows.push_back({std::to_string(k), number(tau_star), number(tau_q),
                    number(tau_full)});
  }
  auto out = run.open("sweep.csv");
  csv::write_rows(out, {"k", "tau_star", "tau_c_quotient", "tau_c_full"}, rows);
  run.check("bound_below_threshold", worst <= 1e-10,
            "max tau_star/tau_c - 1 = " + number(worst));
}

// `count` chords of a k-ring, drawn without replacement from its non-edges.
std::vector<Edge> ring_chords(int k, std::uint64_t seed) {
  std::vector<Edge> candidates;
  for (int a = 0; a < k; ++a)
    for (int b = a + 2; b < k; ++b)
      if (!(a == 0 && b == k - 1)) candidates.push_back({a, b});
  std::mt19937_64 rng(seed);
  for (std::size_t i = candidates.size() - 1; i > 0; --i) {
    const std::size_t j = rng() % (i + 1);
    std::swap(candidates[i], candidates[j]);
  }
  return candidates;
}

void run_ae_bound(Run& run) {
  const auto& spec = run.spec();
  const double eps = spec.epsilon.value_or(0.3);
  const int k = 25;
  std::vector<int> counts;
  for (int c = 0; c <= 10; ++c) counts.push_back(c);
  counts = int_sweep(spec.sweep, counts);
  run.note("epsilon", eps);
  run.note("cells", "40");
  run.note("cell_size", std::to_string(k));

  const auto cg = build_community_graph(catalog::ring_family(k));
  const auto qm = quotient_model(cg.graph, cg.partition, eps);
  const double lambda_base = spectral_radius(qm.Q).lambda1;
  const auto chords = ring_chords(k, spec.seed);

  std::vector<std::vector<std::string>> rows;
  bool bound_ok = true, weyl_ok = true, prop_ok = true;
  for (int count : counts) {
    if (count < 0 || count > static_cast<int>(chords.size()))
      throw std::invalid_argument("chord count out of range");
    std::vector<Edge> edges = cg.graph.edges();
    for (int i = 0; i < cg.partition.n_cells(); ++i) {
      const int base = cg.partition.cell(i).front();
      for (int c = 0; c < count; ++c)
        edges.push_back({base + chords[c].u, base + chords[c].v});
    }
    const Graph perturbed(cg.graph.n_nodes(), std::move(edges));
    const auto report = perturbation_decompose(cg.graph, perturbed, cg.partition);
    const auto aw = weighted_adjacency(perturbed, cg.partition, eps);
    const double lambda_actual = spectral_radius(aw.matrix).lambda1;
    const double lambda_r =
        spectral_radius(report.global_matrix(cg.partition)).lambda1;
    const double pert = perturbation_bound(report);
    const double tau_lower = almost_equitable_lower_bound(qm, report);
    const double tau_actual = threshold(lambda_actual);
    bound_ok &= tau_lower <= tau_actual * (1.0 + 1e-10);
    weyl_ok &= lambda_actual <= (lambda_base + lambda_r) * (1.0 + 1e-10);
    prop_ok &= lambda_r <= pert * (1.0 + 1e-10);
    rows.push_back({std::to_string(count), number(lambda_actual),
                    number(1.0 / tau_lower), number(tau_actual),
                    number(tau_lower), number(lambda_r), number(pert)});
  }
  auto out = run.open("sweep.csv");
  csv::write_rows(out,
                  {"chords", "lambda1_actual", "lambda1_upper", "tau_actual",
                   "tau_ae_lower", "lambda1_R", "perturbation_bound"},
                  rows);
  run.check("ae_bound_below_threshold", bound_ok, "tau_ae_lower <= 1/lambda1(A~)");
  run.check("weyl_inequality", weyl_ok, "lambda1(A+R) <= lambda1(A)+lambda1(R)");
  run.check("perturbation_bound_dominates", prop_ok, "lambda1(R) <= bound");
}

void run_frac(Run& run) {
  const auto& spec = run.spec();
  const double eps = spec.epsilon.value_or(0.3);
  std::vector<double> multiples =
      spec.sweep.empty()
          ? std::vector<double>{1.1, 1.25, 1.5, 2, 3, 4, 6, 8, 10}
          : spec.sweep;
  run.note("epsilon", eps);

  const std::vector<std::pair<std::string, CommunitySpec>> graphs = {
      {"four_cell", catalog::four_cell_example()},
      {"path_of_cliques", catalog::path_of_cliques()}};
  std::vector<std::vector<std::string>> rows;
  double worst_path = 0.0;
  for (const auto& [name, topology] : graphs) {
    const auto cg = build_community_graph(topology);
    const auto qm = quotient_model(cg.graph, cg.partition, eps);
    const auto aw = weighted_adjacency(cg.graph, cg.partition, eps);
    const double tau_c = threshold(spectral_radius(qm.Q).lambda1);
    run.note(name + "_tau_c", tau_c);
    for (double m : multiples) {
      const EpidemicParams p{m * tau_c, 1.0, eps};
      const auto exact = steady_state_full(aw, p);
      const double y_exact = exact.p_inf.mean();
      const auto approx = avg_fraction_approx(qm, p);
      if (name == "path_of_cliques" && m >= 2.0)
        worst_path = std::max(worst_path, std::abs(approx.y - y_exact));
      rows.push_back({name, number(p.tau()), number(m), number(y_exact),
                      number(approx.y), number(approx.r1), number(approx.r2)});
    }
  }
  auto out = run.open("sweep.csv");
  csv::write_rows(out,
                  {"graph", "tau", "tau_over_tau_c", "y_exact", "y_approx",
                   "r1", "r2"},
                  rows);
  run.check("frac_accuracy", worst_path <= 0.05,
            "path_of_cliques max |approx - exact| for tau >= 2 tau_c = " +
                number(worst_path));
}

void run_sis_k_sweep(Run& run) {
  const auto& spec = run.spec();
  const double eps = spec.epsilon.value_or(0.3);
  const double delta = spec.delta.value_or(1.0);
  const int runs = spec.runs.value_or(20);
  const auto ks = int_sweep(spec.sweep, {1, 2, 5, 10});
  const std::vector<double> taus =
      spec.sweep_tau.empty() ? std::vector<double>{0.4, 0.6, 0.8, 1.0}
                             : spec.sweep_tau;
  run.note("epsilon", eps);
  run.note("delta", delta);
  run.note("runs", std::to_string(runs));
  run.note("nodes", "500");
  run.note("degree", "10");
  run.note("t_burn", 10.0 / delta);
  run.note("t_window", 40.0 / delta);

  std::vector<std::vector<std::string>> rows;
  bool upper_ok = true;
  for (int k : ks) {
    const auto cg = build_community_graph(catalog::regular_cliques(500, 10, k));
    const auto qm = quotient_model(cg.graph, cg.partition, eps);
    const auto aw = weighted_adjacency(cg.graph, cg.partition, eps);
    double sq = 0.0;
    for (double tau : taus) {
      const EpidemicParams p{tau * delta, delta, eps};
      const auto steady = steady_state_reduced(qm, p);
      const double y_nimfa = infected_fraction(qm, steady.p_inf);
      const auto sim = steady_fraction(aw, p, 0.0, 0.0, runs, spec.seed, spec.workers);
      sq += (sim.mean - y_nimfa) * (sim.mean - y_nimfa);
      upper_ok &= sim.mean <= y_nimfa + 3.0 * sim.se + 1e-12;
      rows.push_back({std::to_string(k), number(tau), number(y_nimfa),
                      number(sim.mean), number(sim.se),
                      std::to_string(sim.survivors)});
    }
    run.note("rms_k" + std::to_string(k), std::sqrt(sq / taus.size()));
  }
  auto out = run.open("sweep.csv");
  csv::write_rows(out, {"k", "tau", "y_nimfa", "y_sim", "y_sim_se", "survivors"},
                  rows);
  run.check("nimfa_upper_bound", upper_ok, "y_sim <= y_nimfa + 3se at every point");
}

}  // namespace

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.passed; });
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "fig2", "fig3", "completo2", "averaged", "low", "ae_bound", "frac",
      "sis_k_sweep"};
  return ids;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), spec.id) == ids.end())
    throw std::invalid_argument("unknown experiment '" + spec.id + "'");
  if (spec.runs && *spec.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (spec.t_max && !(*spec.t_max > 0.0))
    throw std::invalid_argument("t_max must be positive");

  Run run(spec);
  if (spec.id == "fig2" || spec.id == "fig3") {
    Dynamics d;
    d.topology = catalog::four_cell_example();
    d.params = spec.id == "fig2" ? params_with(spec, 0.29, 1.0, 0.3)
                                 : params_with(spec, 1.5, 0.3, 0.3);
    d.init = {0};
    d.t_max = spec.id == "fig2" ? 20.0 : 30.0;
    d.expected_tau_c = std::pair{0.3178, 0.0005};
    if (spec.epsilon && *spec.epsilon != 0.3) d.expected_tau_c.reset();
    run_dynamics(run, d);
  } else if (spec.id == "completo2") {
    Dynamics d;
    d.topology = catalog::path_of_cliques();
    d.params = params_with(spec, 5.0, 2.0, 0.3);
    for (int v = 0; v < 20; ++v) d.init.push_back(v);
    d.t_max = 5.0;
    d.step = 0.05;
    d.expected_tau_c = std::pair{0.0348, 0.0002};
    if (spec.epsilon && *spec.epsilon != 0.3) d.expected_tau_c.reset();
    run_dynamics(run, d);
  } else if (spec.id == "averaged") {
    run_averaged(run);
  } else if (spec.id == "low") {
    run_low(run);
  } else if (spec.id == "ae_bound") {
    run_ae_bound(run);
  } else if (spec.id == "frac") {
    run_frac(run);
  } else {
    run_sis_k_sweep(run);
  }
  return run.finish();
}

}  // namespace qsis
