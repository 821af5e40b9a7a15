#include <doctest.h>

#include <sstream>

#include "qsis/catalog.hpp"
#include "qsis/community.hpp"
#include "qsis/error.hpp"
#include "qsis/partitions.hpp"
#include "support/oracles.hpp"

using namespace qsis;

namespace {

CommunitySpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_community_spec(in);
}

// Every node has the degree its cell template promises inside the cell and
// d_ij neighbours in each other cell.
void check_realises(const CommunitySpec& spec, const CommunityGraph& cg) {
  const Eigen::MatrixXi expected = spec.cell_degrees();
  const Eigen::MatrixXi counts = oracle::neighbour_counts(cg.graph, cg.partition);
  for (int v = 0; v < cg.graph.n_nodes(); ++v)
    CHECK(counts.row(v) == expected.row(cg.partition.cell_of(v)));
}

}  // namespace

TEST_CASE("cell templates") {
  CHECK(CellShape::empty().internal_degree(4) == 0);
  CHECK(CellShape::ring().internal_degree(5) == 2);
  CHECK(CellShape::clique().internal_degree(6) == 5);
  CHECK(CellShape::regular(3).internal_degree(6) == 3);
  CHECK(CellShape::regular(3).name() == "regular:3");
}

TEST_CASE("circulant cells are regular") {
  for (int k = 1; k <= 12; ++k)
    for (int d = 0; d < k; ++d) {
      if ((k * d) % 2) continue;
      const Graph g(k, circulant_edges(k, d));
      for (int v = 0; v < k; ++v) CHECK(g.degree(v) == d);
    }
}

TEST_CASE("single ring cell is C5") {
  CommunitySpec spec{{5}, {CellShape::ring()}, {}};
  const auto cg = build_community_graph(spec);
  CHECK(format_graph(cg.graph) == "5\n0 1\n0 4\n1 2\n2 3\n3 4\n");
  CHECK(holds(check_equitable(cg.graph, cg.partition)));
}

TEST_CASE("four-cell example realises its cell-degree matrix") {
  const auto spec = catalog::four_cell_example();
  const auto cg = build_community_graph(spec);
  CHECK(cg.graph.n_nodes() == 13);
  Eigen::Matrix4i d;
  d << 0, 2, 4, 0, 1, 1, 2, 3, 1, 1, 2, 0, 0, 1, 0, 3;
  CHECK(spec.cell_degrees() == d);
  check_realises(spec, cg);
  const auto check = check_equitable(cg.graph, cg.partition);
  REQUIRE(holds(check));
  CHECK(std::get<CellDegreeMatrix>(check).d == d);
}

TEST_CASE("path of cliques") {
  const auto spec = catalog::path_of_cliques();
  const auto cg = build_community_graph(spec);
  CHECK(cg.graph.n_nodes() == 80);
  check_realises(spec, cg);
  // 4 cliques of 190 edges + 3 complete bipartite joins of 400.
  CHECK(cg.graph.n_edges() == 4 * 190 + 3 * 400);
}

TEST_CASE("ring family and regular cliques") {
  for (int k : {3, 7, 12}) {
    const auto spec = catalog::ring_family(k);
    const auto cg = build_community_graph(spec);
    CHECK(cg.graph.n_nodes() == 40 * k);
    check_realises(spec, cg);
    for (int v = 0; v < cg.graph.n_nodes(); ++v)
      CHECK(cg.graph.degree(v) == 2 + 39 * 2);
  }
  for (int k : {1, 2, 5, 10}) {
    const auto cg = build_community_graph(catalog::regular_cliques(500, 10, k));
    CHECK(cg.graph.n_nodes() == 500);
    CHECK(cg.partition.n_cells() == 500 / k);
    for (int v = 0; v < 500; ++v) CHECK(cg.graph.degree(v) == 10);
    CHECK(holds(check_equitable(cg.graph, cg.partition)));
  }
}

TEST_CASE("random feasible specs realise their matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = oracle::random_equitable(rng);
    const auto cg = build_community_graph(spec);
    check_realises(spec, cg);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(build_community_graph({{}, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(build_community_graph({{2}, {CellShape::ring()}, {}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_community_graph({{3}, {CellShape::regular(1)}, {}}),
                  std::invalid_argument);
  // k_i d_ij must equal k_j d_ji.
  CHECK_THROWS_AS(build_community_graph({{2, 4},
                                         {CellShape::empty(), CellShape::empty()},
                                         {{0, 1, 2, 2}}}),
                  std::invalid_argument);
  // 3 is not a multiple of lcm(2,4)/2 = 2.
  CHECK_THROWS_AS(build_community_graph({{2, 4},
                                         {CellShape::empty(), CellShape::empty()},
                                         {{0, 1, 3, 1}}}),
                  std::invalid_argument);
}

TEST_CASE("spec text format") {
  const auto spec = parse(
      "# comment\nn = 2\nsizes = 2 4\ntemplates = regular:1 ring\n0 1 2 1\n");
  REQUIRE(spec.n_cells() == 2);
  CHECK(spec.sizes == std::vector<int>{2, 4});
  CHECK(spec.shapes[1].kind == CellShape::Kind::ring);
  REQUIRE(spec.links.size() == 1);
  CHECK(spec.links[0].d_ij == 2);
  CHECK(spec.links[0].d_ji == 1);

  const auto broadcast = parse("sizes = 3 3\ntemplates = clique\n");
  CHECK(broadcast.shapes.size() == 2);

  const auto again = parse(format_community_spec(catalog::four_cell_example()));
  CHECK(again.cell_degrees() == catalog::four_cell_example().cell_degrees());

  CHECK_THROWS_AS(parse("sizes = 3\ntemplates = blob\n"), ParseError);
  CHECK_THROWS_AS(parse("n = 3\nsizes = 3 3\ntemplates = ring\n"), ParseError);
  CHECK_THROWS_AS(parse("sizes = 3 3\ntemplates = ring\n0 5 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse("colour = red\n"), ParseError);
}

TEST_CASE("bundled spec files match the catalog") {
  const auto four = load_community_spec(QSIS_DATA_DIR "/four_cell.spec");
  CHECK(four.cell_degrees() == catalog::four_cell_example().cell_degrees());
  CHECK(four.sizes == catalog::four_cell_example().sizes);
  const auto path = load_community_spec(QSIS_DATA_DIR "/path_of_cliques.spec");
  CHECK(path.cell_degrees() == catalog::path_of_cliques().cell_degrees());
  const Graph g = load_graph(QSIS_DATA_DIR "/four_cell.edges");
  CHECK(format_graph(g) ==
        format_graph(build_community_graph(catalog::four_cell_example()).graph));
}
