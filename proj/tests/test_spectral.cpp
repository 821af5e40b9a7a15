#include <doctest.h>

#include <cmath>

#include "qsis/catalog.hpp"
#include "qsis/spectral.hpp"
#include "support/oracles.hpp"

using namespace qsis;

namespace {

Eigen::MatrixXd complete(int n) {
  return Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
}

Graph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.push_back({u, v});
  return Graph(n, e);
}

}  // namespace

TEST_CASE("power iteration basics") {
  const auto k4 = spectral_radius(complete(4));
  CHECK(k4.converged);
  CHECK(k4.lambda1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(k4.residual <= 1e-12);
  CHECK(k4.eigvec.minCoeff() >= 0.0);
  CHECK(k4.eigvec.norm() == doctest::Approx(1.0));

  // bipartite: spectrum symmetric about 0
  const Graph star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(spectral_radius(star.dense_adjacency()).lambda1 ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral_radius(Eigen::MatrixXd(star.adjacency())).lambda1 ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral_radius(star.adjacency()).lambda1 ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK(spectral_radius(Eigen::MatrixXd::Zero(3, 3)).lambda1 == 0.0);
}

TEST_CASE("power iteration matches the dense solver") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 9;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
    const auto r = spectral_radius(m);
    CHECK(r.converged);
    CHECK(std::abs(r.lambda1 - oracle::spectral_radius(m)) < 1e-9);
    CHECK((m * r.eigvec - r.lambda1 * r.eigvec).lpNorm<Eigen::Infinity>() <= r.residual + 1e-15);
  }
  for (int t = 0; t < 20; ++t) {
    const Graph g = random_graph(rng, 50, 0.1);
    if (g.n_edges() == 0) continue;
    CHECK(std::abs(spectral_radius(g.adjacency()).lambda1 -
                   oracle::spectral_radius(g.dense_adjacency())) < 1e-9);
  }
}

TEST_CASE("float instantiation") {
  const Eigen::MatrixXf k5 = complete(5).cast<float>();
  PowerIterationOptions opts;
  opts.tol = 1e-5;
  const auto r = spectral_radius(k5, opts);
  CHECK(r.lambda1 == doctest::Approx(4.0f).epsilon(1e-5));
}

TEST_CASE("threshold") {
  CHECK(threshold(1.0) == 1.0);
  CHECK(threshold(3.1466) == doctest::Approx(0.3178).epsilon(1e-3));
  CHECK(threshold(28.708) == doctest::Approx(0.03483).epsilon(1e-3));
  CHECK(std::isinf(threshold(0.0)));
}

TEST_CASE("four-cell threshold") {
  const auto cg = build_community_graph(catalog::four_cell_example());
  const auto qm = quotient_model(cg.graph, cg.partition, 0.3);
  const double lq = spectral_radius(qm.Q).lambda1;
  // Characteristic-polynomial root computed independently.
  CHECK(lq == doctest::Approx(3.146569872841143).epsilon(1e-10));
  CHECK(std::abs(threshold(lq) - 0.3178) <= 0.0005);
  const auto aw = weighted_adjacency(cg.graph, cg.partition, 0.3);
  CHECK(std::abs(spectral_radius(aw.matrix).lambda1 - lq) < 1e-9 * lq);
}

TEST_CASE("path of cliques closed form") {
  const double eps = 0.3;
  const auto cg = build_community_graph(catalog::path_of_cliques());
  const auto qm = quotient_model(cg.graph, cg.partition, eps);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double expected = 19.0 + 20.0 * eps * golden;
  const auto h = homogeneous_lambda1(qm);
  REQUIRE(h);
  CHECK(std::abs(*h - expected) < 1e-9);
  CHECK(std::abs(spectral_radius(qm.Q).lambda1 - expected) < 1e-9);
  CHECK(std::abs(threshold(expected) - 0.0348) <= 0.0002);
}

TEST_CASE("homogeneous formula only when uniform") {
  const auto cg = build_community_graph(catalog::four_cell_example());
  CHECK_FALSE(homogeneous_lambda1(quotient_model(cg.graph, cg.partition, 0.3)));
}

TEST_CASE("Weyl bound") {
  SUBCASE("single ring") {
    const auto cg = build_community_graph({{9}, {CellShape::ring()}, {}});
    const auto qm = quotient_model(cg.graph, cg.partition, 0.5);
    CHECK(weyl_lower_bound(qm) == doctest::Approx(0.5));
    CHECK(threshold(spectral_radius(qm.Q).lambda1) == doctest::Approx(0.5));
  }
  SUBCASE("homogeneous equal cells: equality") {
    for (int k : {3, 8, 15}) {
      const auto cg = build_community_graph(catalog::ring_family(k));
      const auto qm = quotient_model(cg.graph, cg.partition, 0.3);
      const double tau_c = threshold(spectral_radius(qm.Q).lambda1);
      CHECK(std::abs(weyl_lower_bound(qm) - tau_c) <= 1e-10);
    }
    const auto cg = build_community_graph(catalog::path_of_cliques());
    const auto qm = quotient_model(cg.graph, cg.partition, 0.3);
    CHECK(std::abs(weyl_lower_bound(qm) - threshold(spectral_radius(qm.Q).lambda1)) <= 1e-10);
  }
  SUBCASE("random instances") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
      const auto cg = build_community_graph(oracle::random_equitable(rng));
      const auto qm = quotient_model(cg.graph, cg.partition, 0.45);
      const auto b = threshold_bounds(qm);
      CHECK(b.tau_star <= b.tau_c * (1 + 1e-12));
    }
  }
}

TEST_CASE("spectral radius of Q equals that of A_w") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto cg = build_community_graph(oracle::random_equitable(rng));
    const double eps = 0.2 + 0.6 * std::uniform_real_distribution<>()(rng);
    const auto qm = quotient_model(cg.graph, cg.partition, eps);
    const auto aw = weighted_adjacency(cg.graph, cg.partition, eps);
    const double lq = spectral_radius(qm.Q).lambda1;
    const double la = spectral_radius(aw.matrix).lambda1;
    if (la == 0.0) {
      CHECK(lq == 0.0);
      continue;
    }
    CHECK(std::abs(lq - la) / la <= 1e-9);
    // every eigenvalue of Q is an eigenvalue of A_w
    const Eigen::VectorXd sq = oracle::spectrum(qm.Q);
    const Eigen::VectorXd sa = oracle::spectrum(aw.dense());
    for (double x : sq) CHECK((sa.array() - x).abs().minCoeff() <= 1e-8);
  }
}

TEST_CASE("monotonicity under edge changes") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const Graph g = random_graph(rng, 12, 0.3);
    std::vector<Edge> missing;
    for (int u = 0; u < 12; ++u)
      for (int v = u + 1; v < 12; ++v)
        if (!g.has_edge(u, v)) missing.push_back({u, v});
    if (missing.empty() || g.n_edges() == 0) continue;
    const double base = spectral_radius(g.adjacency()).lambda1;
    auto added = g.edges();
    added.push_back(missing[rng() % missing.size()]);
    CHECK(spectral_radius(Graph(12, added).adjacency()).lambda1 >= base - 1e-12);
    auto removed = g.edges();
    removed.erase(removed.begin() + rng() % removed.size());
    CHECK(spectral_radius(Graph(12, removed).adjacency()).lambda1 <= base + 1e-12);
  }
}

TEST_CASE("perturbation bounds") {
  CellPerturbation none;
  none.cell_size = 6;
  CHECK(cell_perturbation_bound(none) == 0.0);

  CellPerturbation chord{Eigen::MatrixXd::Zero(6, 6), 6, 1, 2, 1, true};
  CHECK(cell_perturbation_bound(chord) == doctest::Approx(1.0));

  CellPerturbation triangle{Eigen::MatrixXd::Zero(6, 6), 6, 3, 3, 2, true};
  CHECK(cell_perturbation_bound(triangle) == doctest::Approx(2.0));

  // disconnected: min{sqrt(2e(k-1)/k), Delta}
  CellPerturbation two{Eigen::MatrixXd::Zero(4, 4), 4, 2, 4, 1, false};
  CHECK(cell_perturbation_bound(two) == doctest::Approx(1.0));
  CellPerturbation three{Eigen::MatrixXd::Zero(4, 4), 4, 3, 4, 3, false};
  CHECK(cell_perturbation_bound(three) == doctest::Approx(std::sqrt(4.5)));

  PerturbationReport empty;
  CHECK(perturbation_bound(empty) == 0.0);
}

TEST_CASE("perturbation bound dominates lambda1(R)") {
  std::mt19937_64 rng(37);
  const auto cg = build_community_graph(catalog::ring_family(10, 4));
  for (int t = 0; t < 60; ++t) {
    auto e = cg.graph.edges();
    for (int i = 0; i < 4; ++i) {
      const int o = cg.partition.cell(i).front();
      const int adds = static_cast<int>(rng() % 6);
      for (int a = 0; a < adds; ++a) {
        const int u = o + static_cast<int>(rng() % 10), v = o + static_cast<int>(rng() % 10);
        const Edge edge{std::min(u, v), std::max(u, v)};
        if (u != v && !cg.graph.has_edge(u, v) &&
            std::find(e.begin(), e.end(), edge) == e.end())
          e.push_back(edge);
      }
    }
    const Graph perturbed(cg.graph.n_nodes(), e);
    const auto r = perturbation_decompose(cg.graph, perturbed, cg.partition);
    const Eigen::MatrixXd global(r.global_matrix(cg.partition));
    CHECK(oracle::spectral_radius(global) <= perturbation_bound(r) + 1e-12);
    for (const auto& c : r.cells)
      CHECK(oracle::spectral_radius(c.R) <= cell_perturbation_bound(c) + 1e-12);

    const double eps = 0.3;
    const auto qm = quotient_model(cg.graph, cg.partition, eps);
    const double base = spectral_radius(qm.Q).lambda1;
    const double actual =
        spectral_radius(weighted_adjacency(perturbed, cg.partition, eps).matrix).lambda1;
    CHECK(actual <= base + oracle::spectral_radius(global) + 1e-10);
    CHECK(almost_equitable_lower_bound(qm, r) <= threshold(actual) * (1 + 1e-12));
  }
}

TEST_CASE("almost-equitable bound edge cases") {
  const auto cg = build_community_graph(catalog::ring_family(8, 5));
  const auto qm = quotient_model(cg.graph, cg.partition, 0.3);
  const auto same = perturbation_decompose(cg.graph, cg.graph, cg.partition);
  CHECK(almost_equitable_lower_bound(qm, same) ==
        doctest::Approx(weyl_lower_bound(qm)).epsilon(1e-12));

  auto e = cg.graph.edges();
  e.erase(e.begin());
  const Graph smaller(cg.graph.n_nodes(), e);
  const auto del = perturbation_decompose(cg.graph, smaller, cg.partition);
  CHECK(almost_equitable_lower_bound(qm, del) ==
        doctest::Approx(weyl_lower_bound(qm)).epsilon(1e-12));
  const double actual =
      spectral_radius(weighted_adjacency(smaller, cg.partition, 0.3).matrix).lambda1;
  CHECK(threshold(actual) >= threshold(spectral_radius(qm.Q).lambda1) - 1e-12);
}
