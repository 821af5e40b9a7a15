#include "qsis/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "qsis/community.hpp"
#include "qsis/csv.hpp"
#include "qsis/error.hpp"
#include "qsis/experiments.hpp"
#include "qsis/nimfa.hpp"
#include "qsis/partitions.hpp"
#include "qsis/sis_sim.hpp"
#include "qsis/spectral.hpp"

namespace qsis {

namespace {

using csv::number;

struct InputOptions {
  std::string graph;
  std::string cells;
  std::string spec;
  double eps = 1.0;
};

struct Input {
  Graph graph;
  Partition partition;
  bool has_cells = false;
};

void add_input(CLI::App* cmd, InputOptions& in, bool with_eps = true) {
  auto* g = cmd->add_option("--graph", in.graph, "edge-list file");
  cmd->add_option("--cells", in.cells, "partition file, one cell per line")
      ->needs(g);
  cmd->add_option("--spec", in.spec, "community spec file")->excludes(g);
  if (with_eps)
    cmd->add_option("--eps", in.eps, "inter-community factor")
        ->capture_default_str();
}

Input load_input(const InputOptions& in) {
  if (!in.spec.empty()) {
    auto cg = build_community_graph(load_community_spec(in.spec));
    return {std::move(cg.graph), std::move(cg.partition), true};
  }
  if (in.graph.empty())
    throw std::invalid_argument("one of --graph or --spec is required");
  Graph g = load_graph(in.graph);
  if (in.cells.empty()) {
    Partition p = Partition::whole(g.n_nodes());
    return {std::move(g), std::move(p), false};
  }
  Partition p = load_partition(in.cells, g);
  return {std::move(g), std::move(p), true};
}

void require_cells(const Input& input, const char* what) {
  if (!input.has_cells)
    throw std::invalid_argument(std::string(what) + " needs --cells or --spec");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, int limit,
                            const char* what) {
  std::vector<int> out;
  for (double v : parse_doubles(text)) {
    if (v != static_cast<int>(v) || v < 0 || v >= limit)
      throw std::invalid_argument(std::string(what) + " id out of range: " +
                                  number(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// Writes to the named file, or to `out` when the name is empty or "-".
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  body(file);
}

// Node-level initial state from "cell:p_1,...,p_n", "nodes:i,j,..." or a
// file of whitespace-separated probabilities (length N or n).
Eigen::VectorXd initial_state(const std::string& spec, const Input& input) {
  const int n_nodes = input.graph.n_nodes();
  const int n_cells = input.partition.n_cells();
  if (starts_with(spec, "cell:")) {
    const auto probs = parse_doubles(spec.substr(5));
    if (static_cast<int>(probs.size()) != n_cells)
      throw std::invalid_argument("--init cell: expects " +
                                  std::to_string(n_cells) + " values");
    return lift(Eigen::Map<const Eigen::VectorXd>(probs.data(), n_cells),
                input.partition);
  }
  if (starts_with(spec, "nodes:")) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_nodes);
    for (int v : parse_ints(spec.substr(6), n_nodes, "node")) p[v] = 1.0;
    return p;
  }
  std::ifstream in(spec);
  if (!in) throw Error("cannot read initial state '" + spec + "'");
  std::vector<double> values;
  double v = 0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw ParseError(0, "bad number in " + spec);
  const auto size = static_cast<int>(values.size());
  Eigen::Map<const Eigen::VectorXd> x(values.data(), size);
  if (size == n_nodes) return x;
  if (size == n_cells) return lift(x, input.partition);
  throw std::invalid_argument("initial state has " + std::to_string(size) +
                              " entries, expected " + std::to_string(n_nodes) +
                              " or " + std::to_string(n_cells));
}

std::vector<int> initial_infected(const std::string& spec, const Input& input) {
  const int n_nodes = input.graph.n_nodes();
  if (spec == "all") {
    std::vector<int> all(n_nodes);
    for (int v = 0; v < n_nodes; ++v) all[v] = v;
    return all;
  }
  if (starts_with(spec, "nodes:")) return parse_ints(spec.substr(6), n_nodes, "node");
  if (starts_with(spec, "cells:")) {
    std::vector<int> nodes;
    for (int c : parse_ints(spec.substr(6), input.partition.n_cells(), "cell")) {
      const auto& cell = input.partition.cell(c);
      nodes.insert(nodes.end(), cell.begin(), cell.end());
    }
    std::sort(nodes.begin(), nodes.end());
    return nodes;
  }
  throw std::invalid_argument("--init expects all, nodes:i,j,... or cells:i,j,...");
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  csv::write_matrix(out, m);
}

struct Commands {
  InputOptions in;

  // check-partition / quotient
  bool tilde = false;

  // threshold / bounds
  std::string method = "quotient";
  std::string base;

  // nimfa / steady-state
  std::string system = "reduced";
  double beta = 1.0, delta = 1.0;
  double tmax = 10.0, dt = 0.0, sample = 0.1;
  std::string init;
  double tol = 0.0;
  std::string out;

  // simulate
  int runs = 10000;
  std::uint64_t seed = 20150601;
  double grid_step = 0.1;
  double burn = 0.0, window = 0.0;
  bool per_node = false;
  bool events = false;
  unsigned workers = 0;

  // experiment
  std::string id;
  std::optional<double> x_beta, x_delta, x_eps, x_tmax;
  std::optional<int> x_runs;
  std::string sweep, sweep_tau;

  // build-graph
  std::string out_graph, out_cells;
};

void run_check_partition(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  require_cells(input, "check-partition");
  const auto eq = check_equitable(input.graph, input.partition);
  const auto ae = check_almost_equitable(input.graph, input.partition);
  out << "equitable," << (holds(eq) ? "true" : "false") << '\n';
  out << "almost_equitable," << (holds(ae) ? "true" : "false") << '\n';
  if (!holds(eq)) out << "violation," << std::get<Violation>(eq).message() << '\n';
  if (!holds(ae) && std::get<Violation>(ae).message() != std::get<Violation>(eq).message())
    out << "violation," << std::get<Violation>(ae).message() << '\n';
  if (holds(ae)) {
    out << "cell_degrees\n";
    csv::write_matrix(out, std::get<CellDegreeMatrix>(ae).d);
  }
}

void run_quotient(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  require_cells(input, "quotient");
  const auto qm = quotient_model(input.graph, input.partition, c.in.eps);
  write_matrix_csv(out, c.tilde ? qm.Q_tilde : qm.Q);
}

void run_threshold(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  SpectralResult r;
  if (c.method == "quotient") {
    require_cells(input, "threshold --method quotient");
    r = spectral_radius(quotient_model(input.graph, input.partition, c.in.eps).Q);
  } else {
    r = spectral_radius(weighted_adjacency(input.graph, input.partition, c.in.eps).matrix);
  }
  if (!r.converged) throw Error("power iteration did not converge");
  csv::write_row(out, "lambda1", r.lambda1);
  csv::write_row(out, "tau_c", threshold(r.lambda1));
}

void run_bounds(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  require_cells(input, "bounds");
  if (c.base.empty()) {
    const auto qm = quotient_model(input.graph, input.partition, c.in.eps);
    const auto b = threshold_bounds(qm);
    csv::write_row(out, "lambda1", b.lambda1);
    csv::write_row(out, "tau_c", b.tau_c);
    csv::write_row(out, "tau_star", b.tau_star);
    if (b.exact_homogeneous) csv::write_row(out, "tau_homogeneous", *b.exact_homogeneous);
    return;
  }
  const Graph base = load_graph(c.base);
  const auto qm = quotient_model(base, input.partition, c.in.eps);
  const auto report = perturbation_decompose(base, input.graph, input.partition);
  const auto b = threshold_bounds(qm);
  const double actual =
      spectral_radius(weighted_adjacency(input.graph, input.partition, c.in.eps).matrix)
          .lambda1;
  csv::write_row(out, "base_lambda1", b.lambda1);
  csv::write_row(out, "base_tau_c", b.tau_c);
  csv::write_row(out, "tau_star", b.tau_star);
  csv::write_row(out, "perturbation_bound", perturbation_bound(report));
  csv::write_row(out, "tau_ae_lower", almost_equitable_lower_bound(qm, report));
  csv::write_row(out, "lambda1", actual);
  csv::write_row(out, "tau_c", threshold(actual));
}

void run_nimfa(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  if (c.init.empty()) throw std::invalid_argument("--init is required");
  const EpidemicParams params{c.beta, c.delta, c.in.eps};
  params.validate();
  const Eigen::VectorXd p0 = initial_state(c.init, input);
  Trajectory traj;
  if (c.system == "full") {
    const auto aw = weighted_adjacency(input.graph, input.partition, c.in.eps);
    traj = integrate_full(aw, params, p0, c.tmax, c.dt, c.sample);
  } else {
    require_cells(input, "--system reduced");
    const auto qm = quotient_model(input.graph, input.partition, c.in.eps);
    traj = integrate_reduced(qm, params, cell_average(p0, input.partition),
                             c.tmax, c.dt, c.sample);
  }
  emit(c.out, out, [&](std::ostream& o) { csv::write_trajectory(o, traj); });
}

// Integrates in blocks of 10/delta from the all-ones state until the rhs
// falls below tol or t_max is spent.
SteadyState ode_steady_state(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                             int dim, double dt, double t_max, double tol,
                             double block) {
  SteadyState s;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(dim);
  double t = 0.0;
  while (t < t_max) {
    IntegrationOptions opts;
    opts.t_end = std::min(block, t_max - t);
    opts.dt = std::min(dt, opts.t_end);
    opts.sample_interval = opts.t_end;
    x = integrate(rhs, x, opts).final_state();
    t += opts.t_end;
    ++s.iterations;
    s.residual = rhs(x).lpNorm<Eigen::Infinity>();
    if (s.residual <= tol) {
      s.converged = true;
      break;
    }
  }
  s.p_inf = x;
  return s;
}

void run_steady_state(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  const EpidemicParams params{c.beta, c.delta, c.in.eps};
  params.validate();
  const bool fixed_point = c.method == "fixedpoint";
  FixedPointOptions fp;
  if (c.tol > 0) fp.tol = c.tol;
  const double ode_tol = c.tol > 0 ? c.tol : 1e-10;
  const double t_max = c.tmax > 0 ? c.tmax : 1000.0 / c.delta;

  SteadyState s;
  std::optional<QuotientModel> qm;
  if (c.system == "full") {
    const auto aw = weighted_adjacency(input.graph, input.partition, c.in.eps);
    const double dt = c.dt > 0 ? c.dt : default_dt(params, aw.max_row_sum());
    s = fixed_point ? steady_state_full(aw, params, fp)
                    : ode_steady_state(
                          [&](const Eigen::VectorXd& x) { return full_rhs(aw, params, x); },
                          aw.n_nodes(), dt, t_max, ode_tol, 10.0 / c.delta);
  } else {
    require_cells(input, "--system reduced");
    qm = quotient_model(input.graph, input.partition, c.in.eps);
    const double dt =
        c.dt > 0 ? c.dt : default_dt(params, qm->Q_tilde.rowwise().sum().maxCoeff());
    s = fixed_point
            ? steady_state_reduced(*qm, params, fp)
            : ode_steady_state(
                  [&](const Eigen::VectorXd& x) { return reduced_rhs(*qm, params, x); },
                  qm->n_cells(), dt, t_max, ode_tol, 10.0 / c.delta);
  }
  emit(c.out, out, [&](std::ostream& o) {
    for (Eigen::Index i = 0; i < s.p_inf.size(); ++i)
      csv::write_row(o, "p_" + std::to_string(i + 1), s.p_inf[i]);
    csv::write_row(o, "fraction",
                   qm ? infected_fraction(*qm, s.p_inf) : s.p_inf.mean());
    csv::write_row(o, "residual", s.residual);
    o << "iterations," << s.iterations << '\n';
    o << "converged," << (s.converged || s.below_threshold ? "true" : "false") << '\n';
  });
  if (!s.converged && !s.below_threshold) throw Error("steady state did not converge");
}

void run_simulate(Commands& c, std::ostream& out) {
  const auto input = load_input(c.in);
  const EpidemicParams params{c.beta, c.delta, c.in.eps};
  params.validate();
  if (c.runs < 1) throw std::invalid_argument("--runs must be >= 1");
  const auto aw = weighted_adjacency(input.graph, input.partition, c.in.eps);

  if (c.burn > 0 || c.window > 0) {
    const auto sf =
        steady_fraction(aw, params, c.burn, c.window, c.runs, c.seed, c.workers);
    emit(c.out, out, [&](std::ostream& o) {
      csv::write_row(o, "mean", sf.mean);
      csv::write_row(o, "se", sf.se);
      o << "survivors," << sf.survivors << "\nruns," << sf.runs << '\n';
    });
    return;
  }

  if (c.init.empty()) throw std::invalid_argument("--init is required");
  const auto init = initial_infected(c.init, input);
  const auto grid = time_grid(c.tmax, c.grid_step);
  if (c.events) {
    RunOptions opts;
    opts.record_events = true;
    opts.check_every = 1000;
    const auto path = simulate_run(aw, params, init, grid, replica_seed(c.seed, 0), opts);
    emit(c.out, out, [&](std::ostream& o) {
      o << "t,node,event\n";
      for (const auto& e : path.log)
        o << number(e.t) << ',' << e.node << ','
          << (e.infection ? "infection" : "recovery") << '\n';
    });
    return;
  }
  const Partition groups = c.per_node ? Partition::singletons(input.graph.n_nodes())
                                      : input.partition;
  const auto stats = ensemble(aw, params, init, grid, groups, c.runs, c.seed, c.workers);
  emit(c.out, out, [&](std::ostream& o) {
    csv::write_ensemble(o, stats, c.per_node ? "node" : "cell");
  });
}

int run_experiment_cmd(Commands& c, std::ostream& out) {
  ExperimentSpec spec;
  spec.id = c.id;
  spec.beta = c.x_beta;
  spec.delta = c.x_delta;
  spec.epsilon = c.x_eps;
  spec.runs = c.x_runs;
  spec.t_max = c.x_tmax;
  spec.seed = c.seed;
  spec.sweep = parse_doubles(c.sweep);
  spec.sweep_tau = parse_doubles(c.sweep_tau);
  spec.out_dir = c.out.empty() ? "." : c.out;
  spec.workers = c.workers;
  const auto result = run_experiment(spec);
  for (const auto& check : result.checks)
    out << "check " << check.name << ": " << (check.passed ? "pass" : "fail")
        << " (" << check.detail << ")\n";
  for (const auto& f : result.files) out << "wrote " << f.string() << '\n';
  return result.passed() ? 0 : 1;
}

void run_build_graph(Commands& c, std::ostream& out) {
  const auto cg = build_community_graph(load_community_spec(c.in.spec));
  if (c.out_graph.empty()) {
    out << format_graph(cg.graph);
  } else {
    save_graph(cg.graph, c.out_graph);
  }
  if (!c.out_cells.empty()) save_partition(cg.partition, c.out_cells);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Replaces "--config FILE" by the flags listed in FILE as "key = value"
// lines ('#' starts a comment). Flags already on the command line win.
std::vector<std::string> expand_config(CLI::App& app,
                                       std::vector<std::string> args) {
  CLI::App* sub = nullptr;
  std::size_t sub_pos = 0;
  for (std::size_t i = 0; i < args.size() && !sub; ++i)
    if ((sub = app.get_subcommand_no_throw(args[i]))) sub_pos = i;
  if (!sub) return args;

  std::string path;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (starts_with(args[i], "--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin() + sub_pos + 1, args.end(), [&](const auto& a) {
      return a == flag || starts_with(a, flag + "=");
    });
  };
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ConfigError(path + ":" + std::to_string(line_no) +
                             ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config")
      throw CLI::ConfigError(path + ":" + std::to_string(line_no) +
                             ": unknown key '" + key + "'");
    if (given(flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") extra.push_back(flag);
      else if (value != "false" && value != "0")
        throw CLI::ConfigError(path + ":" + std::to_string(line_no) +
                               ": flag '" + key + "' expects true or false");
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  args.insert(args.begin() + sub_pos + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Epidemic thresholds, mean-field dynamics and SIS simulation on "
               "community graphs", "qsis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all subcommand help");
  Commands c;

  auto* check = app.add_subcommand("check-partition",
                                   "test whether the cells form an (almost) equitable partition");
  add_input(check, c.in, false);

  auto* quotient = app.add_subcommand("quotient", "print the quotient matrix Q as CSV");
  add_input(quotient, c.in);
  quotient->add_flag("--tilde", c.tilde, "print the similar matrix driving the reduced system");

  auto* thr = app.add_subcommand("threshold", "spectral radius and epidemic threshold");
  add_input(thr, c.in);
  thr->add_option("--method", c.method)
      ->check(CLI::IsMember({"quotient", "full"}))
      ->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "threshold lower bounds");
  add_input(bounds, c.in);
  bounds->add_option("--base", c.base,
                     "equitable base graph; the --graph edges are then an intra-cell "
                     "perturbation of it");

  auto add_rates = [&](CLI::App* cmd) {
    cmd->add_option("--beta", c.beta, "infection rate")->capture_default_str();
    cmd->add_option("--delta", c.delta, "curing rate")->capture_default_str();
  };
  auto add_system = [&](CLI::App* cmd) {
    cmd->add_option("--system", c.system)
        ->check(CLI::IsMember({"full", "reduced"}))
        ->capture_default_str();
  };

  auto* nimfa = app.add_subcommand("nimfa", "integrate the mean-field equations");
  add_input(nimfa, c.in);
  add_rates(nimfa);
  add_system(nimfa);
  nimfa->add_option("--tmax", c.tmax)->capture_default_str();
  nimfa->add_option("--dt", c.dt, "RK4 step; 0 picks 0.01/max(beta d_max, delta)");
  nimfa->add_option("--sample", c.sample, "output spacing; 0 writes every step")
      ->capture_default_str();
  nimfa->add_option("--init", c.init, "cell:p_1,...,p_n | nodes:i,j,... | file");
  nimfa->add_option("--out", c.out, "CSV file (default stdout)");

  auto* steady = app.add_subcommand("steady-state", "mean-field endemic state");
  add_input(steady, c.in);
  add_rates(steady);
  add_system(steady);
  steady->add_option("--method", c.method = "fixedpoint")
      ->check(CLI::IsMember({"ode", "fixedpoint"}));
  steady->add_option("--tol", c.tol, "fixed-point step or ODE rhs tolerance");
  steady->add_option("--tmax", c.tmax, "ODE time budget (default 1000/delta)");
  steady->add_option("--dt", c.dt);
  steady->add_option("--out", c.out);

  auto* sim = app.add_subcommand("simulate", "exact stochastic SIS simulation");
  add_input(sim, c.in);
  add_rates(sim);
  sim->add_option("--runs", c.runs)->capture_default_str();
  sim->add_option("--seed", c.seed)->capture_default_str();
  sim->add_option("--tmax", c.tmax)->capture_default_str();
  sim->add_option("--grid-step", c.grid_step)->capture_default_str();
  sim->add_option("--init", c.init, "all | nodes:i,j,... | cells:i,j,...");
  sim->add_option("--burn", c.burn, "steady-fraction mode: burn-in time (default 10/delta)");
  sim->add_option("--window", c.window, "steady-fraction mode: averaging window (default 40/delta)");
  auto* per_cell = sim->add_flag("--per-cell", "group statistics by cell (default)");
  sim->add_flag("--per-node", c.per_node, "group statistics by node")->excludes(per_cell);
  sim->add_flag("--events", c.events, "print the event log of replica 0");
  sim->add_option("--workers", c.workers, "threads (default $QSIS_WORKERS or all cores)");
  sim->add_option("--out", c.out);

  auto* exp = app.add_subcommand("experiment", "scripted reproduction runs");
  std::string ids;
  for (const auto& id : experiment_ids()) ids += (ids.empty() ? "" : ", ") + id;
  exp->add_option("id", c.id, ids)->required()->check(CLI::IsMember(experiment_ids()));
  exp->add_option("--beta", c.x_beta);
  exp->add_option("--delta", c.x_delta);
  exp->add_option("--eps", c.x_eps);
  exp->add_option("--runs", c.x_runs);
  exp->add_option("--tmax", c.x_tmax);
  exp->add_option("--seed", c.seed)->capture_default_str();
  exp->add_option("--sweep", c.sweep, "comma-separated sweep values");
  exp->add_option("--sweep-tau", c.sweep_tau, "comma-separated tau values (sis_k_sweep)");
  exp->add_option("--out", c.out, "output directory")->capture_default_str();
  exp->add_option("--workers", c.workers);

  auto* build = app.add_subcommand("build-graph", "materialise a community spec");
  build->add_option("--spec", c.in.spec)->required();
  build->add_option("--out-graph", c.out_graph, "edge-list file (default stdout)");
  build->add_option("--out-cells", c.out_cells, "partition file");

  for (auto* sub : app.get_subcommands({}))
    sub->add_option("--config", "key=value file supplying flags");

  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  try {
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (check->parsed()) run_check_partition(c, out);
    else if (quotient->parsed()) run_quotient(c, out);
    else if (thr->parsed()) run_threshold(c, out);
    else if (bounds->parsed()) run_bounds(c, out);
    else if (nimfa->parsed()) run_nimfa(c, out);
    else if (steady->parsed()) run_steady_state(c, out);
    else if (sim->parsed()) run_simulate(c, out);
    else if (exp->parsed()) return run_experiment_cmd(c, out);
    else if (build->parsed()) run_build_graph(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qsis
