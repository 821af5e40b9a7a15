#include <doctest.h>

#include <functional>
#include <sstream>

#include "qsis/error.hpp"
#include "qsis/graph.hpp"
#include "support/oracles.hpp"

using namespace qsis;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

Partition cells(const std::string& text, int n) {
  std::istringstream in(text);
  return parse_partition(in, n);
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("edge list parsing") {
  const Graph g = parse("3\n0 1\n1 2\n");
  CHECK(g.n_nodes() == 3);
  REQUIRE(g.n_edges() == 2);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{1, 2});
  CHECK(g.degree(1) == 2);
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("edges are canonicalised") {
  const Graph g = parse("# comment\n4\n3 2\n1 0\n\n2 0\n");
  CHECK(format_graph(g) == "4\n0 1\n0 2\n2 3\n");
  CHECK(g.max_degree() == 2);
}

TEST_CASE("parse errors carry the line") {
  const auto self_loop = error_of([] { parse("3\n0 1\n0 0\n"); });
  CHECK(self_loop.find("line 3") != std::string::npos);
  CHECK(self_loop.find("self-loop") != std::string::npos);
  CHECK_THROWS_AS(parse("3\n0 1\n1 0\n"), ParseError);
  CHECK_THROWS_AS(parse("3\n0 3\n"), ParseError);
  CHECK_THROWS_AS(parse("3\n0 x\n"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("2\n0 1\n1 0\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("graph constructor validates") {
  CHECK_THROWS_AS(Graph(2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(-1, {}), std::invalid_argument);
}

TEST_CASE("adjacency is symmetric") {
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
  const Eigen::MatrixXd a = g.dense_adjacency();
  CHECK(a.isApprox(a.transpose()));
  CHECK(a.sum() == doctest::Approx(10.0));
  CHECK(Eigen::MatrixXd(g.adjacency()) == a);
}

TEST_CASE("partition file parsing") {
  const Partition p = cells("0\n1 2\n", 3);
  REQUIRE(p.n_cells() == 2);
  CHECK(p.cell(0) == std::vector<int>{0});
  CHECK(p.cell(1) == std::vector<int>{1, 2});
  CHECK(p.cell_of(2) == 1);

  const auto overlap = error_of([] { cells("0 1\n1 2\n", 3); });
  CHECK(overlap.find("overlap at node 1") != std::string::npos);
  CHECK_THROWS_AS(cells("0\n1\n", 3), ParseError);
  CHECK_THROWS_AS(cells("0 1 5\n", 3), ParseError);

  const Partition whole = cells("0 1 2 3 4", 5);
  CHECK(whole.n_cells() == 1);
  CHECK(whole.size(0) == 5);
}

TEST_CASE("partition constructor validates") {
  CHECK_THROWS_WITH_AS(Partition(3, {{0}, {}, {1, 2}}), "empty cell 1",
                       std::invalid_argument);
  CHECK_THROWS_AS(Partition(3, {{0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Partition(3, {{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Partition(3, {{0, 1, 3}}), std::invalid_argument);
  const std::vector<int> sizes = {2, 3};
  const Partition p = Partition::contiguous(sizes);
  CHECK(p.cell(1) == std::vector<int>{2, 3, 4});
  CHECK(p.sizes() == Eigen::Vector2i(2, 3));
}

TEST_CASE("partition round trip") {
  const Partition p(6, {{4, 1}, {0, 2, 3}, {5}});
  std::istringstream in(format_partition(p));
  const Partition q = parse_partition(in, 6);
  CHECK(q.cells() == p.cells());
}

TEST_CASE("weighted adjacency, two joined K2") {
  const Graph g(4, {{0, 1}, {2, 3}, {1, 2}});
  const Partition p(4, {{0, 1}, {2, 3}});
  const auto aw = weighted_adjacency(g, p, 0.5);
  const Eigen::MatrixXd w = aw.dense();
  CHECK(w(0, 1) == 1.0);
  CHECK(w(2, 3) == 1.0);
  CHECK(w(1, 2) == 0.5);
  CHECK(w(2, 1) == 0.5);
  CHECK(w(0, 2) == 0.0);
  CHECK(aw.intra(0, 1));
  CHECK_FALSE(aw.intra(1, 2));
  CHECK(aw.max_row_sum() == doctest::Approx(1.5));
  CHECK(w == oracle::weighted(g, p, 0.5));
}

TEST_CASE("weighted adjacency special cases") {
  const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}});
  const Partition p(5, {{0, 1}, {2, 3, 4}});
  CHECK(weighted_adjacency(g, p, 1.0).dense() == g.dense_adjacency());
  const auto singles = weighted_adjacency(g, Partition::singletons(5), 0.2);
  CHECK(singles.dense().isApprox(0.2 * g.dense_adjacency()));
  CHECK_THROWS_AS(weighted_adjacency(g, p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_adjacency(g, Partition::whole(4), 0.5),
                  std::invalid_argument);
}
