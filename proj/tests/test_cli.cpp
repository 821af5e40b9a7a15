#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsis/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsis");
  std::ostringstream out, err;
  const int code = qsis::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string data = QSIS_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qsis_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double value_of(const std::string& csv, const std::string& key) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  FAIL("missing key " << key);
  return 0;
}

}  // namespace

TEST_CASE("threshold on the four-cell example") {
  const auto r = run({"threshold", "--graph", data + "/four_cell.edges", "--cells",
                      data + "/four_cell.cells", "--eps", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(value_of(r.out, "tau_c") - 0.3178) <= 0.0005);
  const auto full = run({"threshold", "--spec", data + "/four_cell.spec", "--eps",
                         "0.3", "--method", "full"});
  CHECK(value_of(full.out, "lambda1") ==
        doctest::Approx(value_of(r.out, "lambda1")).epsilon(1e-9));
}

TEST_CASE("usage errors exit 2") {
  auto r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"threshold", "--eps"}).code == 2);
  CHECK(run({"threshold", "--method", "magic"}).code == 2);
  CHECK(run({"experiment", "fig9"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("non-equitable input exits 1 naming node and cell") {
  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.cells") << "0 1\n2 3 4 5 6\n7 8 9 10 11 12\n";
  const auto r = run({"quotient", "--graph", data + "/four_cell.edges", "--cells",
                      (dir / "bad.cells").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("node 1") != std::string::npos);
  CHECK(r.err.find("cell 0") != std::string::npos);

  const auto c = run({"check-partition", "--graph", data + "/four_cell.edges",
                      "--cells", (dir / "bad.cells").string()});
  CHECK(c.code == 0);
  CHECK(c.out.find("equitable,false") != std::string::npos);
}

TEST_CASE("domain errors exit 1") {
  CHECK(run({"threshold", "--graph", "/nonexistent.edges"}).code == 1);
  CHECK(run({"nimfa", "--spec", data + "/four_cell.spec", "--init", "cell:1,0"}).code == 1);
  CHECK(run({"nimfa", "--spec", data + "/four_cell.spec", "--beta", "-1", "--init",
             "nodes:0"}).code == 1);
}

TEST_CASE("quotient and check-partition output") {
  const auto q = run({"quotient", "--spec", data + "/four_cell.spec", "--eps", "1"});
  REQUIRE(q.code == 0);
  CHECK(q.out.rfind("0,1.41421356237,2,0\n", 0) == 0);
  const auto t = run({"quotient", "--spec", data + "/four_cell.spec", "--eps", "1", "--tilde"});
  CHECK(t.out.rfind("0,2,4,0\n", 0) == 0);
  const auto c = run({"check-partition", "--spec", data + "/four_cell.spec"});
  CHECK(c.out.find("equitable,true") != std::string::npos);
  CHECK(c.out.find("0,2,4,0") != std::string::npos);
}

TEST_CASE("bounds output") {
  const auto r = run({"bounds", "--spec", data + "/path_of_cliques.spec", "--eps", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "tau_star") == doctest::Approx(value_of(r.out, "tau_c")));
  CHECK(value_of(r.out, "tau_homogeneous") == doctest::Approx(value_of(r.out, "tau_c")));
}

TEST_CASE("nimfa and steady-state") {
  const auto r = run({"nimfa", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                      "--beta", "1.5", "--delta", "0.3", "--init", "nodes:0",
                      "--tmax", "1", "--sample", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,p_1,p_2,p_3,p_4\n0,1,0,0,0\n0.5,", 0) == 0);
  const auto f = run({"nimfa", "--spec", data + "/four_cell.spec", "--system", "full",
                      "--init", "cell:1,0,0.5,0", "--tmax", "1", "--sample", "1"});
  REQUIRE(f.code == 0);
  CHECK(f.out.find("p_13") != std::string::npos);

  const auto fp = run({"steady-state", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                       "--beta", "1.5", "--delta", "0.3"});
  const auto ode = run({"steady-state", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                        "--beta", "1.5", "--delta", "0.3", "--method", "ode"});
  REQUIRE(fp.code == 0);
  REQUIRE(ode.code == 0);
  for (const char* k : {"p_1", "p_2", "p_3", "p_4"})
    CHECK(std::abs(value_of(fp.out, k) - value_of(ode.out, k)) < 1e-6);
}

TEST_CASE("config file supplies flags") {
  const auto dir = scratch("config");
  std::ofstream(dir / "run.ini") << "# steady state run\neps = 0.3\nbeta=1.5\ndelta = 0.3\n";
  const auto a = run({"steady-state", "--spec", data + "/four_cell.spec", "--config",
                      (dir / "run.ini").string()});
  const auto b = run({"steady-state", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                      "--beta", "1.5", "--delta", "0.3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  // command line wins over the file
  const auto c = run({"steady-state", "--spec", data + "/four_cell.spec", "--config",
                      (dir / "run.ini").string(), "--beta", "0.29", "--delta", "1"});
  CHECK(value_of(c.out, "p_1") == 0.0);
  std::ofstream(dir / "bad.ini") << "colour = red\n";
  CHECK(run({"threshold", "--spec", data + "/four_cell.spec", "--config",
             (dir / "bad.ini").string()}).code == 2);
}

TEST_CASE("simulate output") {
  const auto r = run({"simulate", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                      "--beta", "1.5", "--delta", "0.3", "--init", "nodes:0", "--runs",
                      "50", "--tmax", "1", "--grid-step", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,cell_1_mean,cell_1_se,cell_2_mean", 0) == 0);
  CHECK(r.out.find(",survivors\n0,1,0,0,0,0,0,0,0,50\n") != std::string::npos);
  const auto n = run({"simulate", "--spec", data + "/four_cell.spec", "--init", "cells:1",
                      "--runs", "5", "--tmax", "1", "--per-node"});
  CHECK(n.out.rfind("t,node_1_mean", 0) == 0);
  const auto ev = run({"simulate", "--spec", data + "/four_cell.spec", "--init", "all",
                       "--tmax", "1", "--events"});
  CHECK(ev.out.rfind("t,node,event\n", 0) == 0);
  const auto sf = run({"simulate", "--spec", data + "/four_cell.spec", "--eps", "0.3",
                       "--beta", "1.5", "--delta", "0.3", "--runs", "10", "--burn", "5",
                       "--window", "5"});
  CHECK(value_of(sf.out, "mean") > 0.5);
}

TEST_CASE("experiment writes fixed file names and is reproducible") {
  const auto a = scratch("exp_a"), b = scratch("exp_b");
  const auto ra = run({"experiment", "fig3", "--runs", "200", "--out", a.string(),
                       "--workers", "1"});
  const auto rb = run({"experiment", "fig3", "--runs", "200", "--out", b.string(),
                       "--workers", "3"});
  CHECK(ra.code == 0);
  CHECK(rb.code == 0);
  for (const char* f : {"trajectory.csv", "ensemble.csv", "summary.txt"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "summary.txt").find("check threshold = pass") != std::string::npos);

  const auto low = scratch("low");
  CHECK(run({"experiment", "low", "--sweep", "3,5", "--out", low.string()}).code == 0);
  CHECK(slurp(low / "sweep.csv").rfind("k,tau_star,tau_c_quotient,tau_c_full\n3,", 0) == 0);
}

TEST_CASE("build-graph round trip") {
  const auto dir = scratch("build");
  const auto r = run({"build-graph", "--spec", data + "/four_cell.spec", "--out-graph",
                      (dir / "g.edges").string(), "--out-cells", (dir / "g.cells").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "g.edges") == slurp(data + "/four_cell.edges"));
  CHECK(slurp(dir / "g.cells") == slurp(data + "/four_cell.cells"));
}
