#include "qsis/catalog.hpp"

#include <stdexcept>
#include <string>

namespace qsis::catalog {

CommunitySpec four_cell_example() {
  CommunitySpec s;
  s.sizes = {1, 2, 4, 6};
  s.shapes = {CellShape::empty(), CellShape::regular(1), CellShape::ring(),
              CellShape::regular(3)};
  s.links = {{0, 1, 2, 1}, {0, 2, 4, 1}, {1, 2, 2, 1}, {1, 3, 3, 1}};
  return s;
}

CommunitySpec path_of_cliques(int n_cells, int k) {
  CommunitySpec s;
  s.sizes.assign(n_cells, k);
  s.shapes.assign(n_cells, CellShape::clique());
  for (int i = 0; i + 1 < n_cells; ++i) s.links.push_back({i, i + 1, k, k});
  return s;
}

CommunitySpec ring_family(int k, int n_cells, int cross) {
  CommunitySpec s;
  s.sizes.assign(n_cells, k);
  s.shapes.assign(n_cells, CellShape::ring());
  for (int i = 0; i < n_cells; ++i)
    for (int j = i + 1; j < n_cells; ++j) s.links.push_back({i, j, cross, cross});
  return s;
}

CommunitySpec regular_cliques(int n_nodes, int degree, int k) {
  if (k < 1 || n_nodes % k != 0)
    throw std::invalid_argument("clique size must divide the node count");
  const int cross = degree - (k - 1);
  if (cross < 0)
    throw std::invalid_argument("clique size exceeds degree + 1");
  const int n = n_nodes / k;
  if (cross >= n || (cross % 2 == 1 && n % 2 == 1))
    throw std::invalid_argument("cannot lay out " + std::to_string(cross) +
                                " cross links over " + std::to_string(n) +
                                " cells");
  CommunitySpec s;
  s.sizes.assign(n, k);
  s.shapes.assign(n, CellShape::clique());
  for (auto e : circulant_edges(n, cross)) s.links.push_back({e.u, e.v, 1, 1});
  return s;
}

}  // namespace qsis::catalog
