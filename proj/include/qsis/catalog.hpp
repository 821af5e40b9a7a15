#pragma once

#include "qsis/community.hpp"

// Community specs for the reference topologies shipped with the library.
namespace qsis::catalog {

// 13-node, 4-cell network with cell sizes (1, 2, 4, 6) and cell-degree
// matrix
//   [0 2 4 0; 1 1 2 3; 1 1 2 0; 0 1 0 3].
CommunitySpec four_cell_example();

// `n_cells` cliques of `k` nodes on a path quotient, consecutive cliques
// fully joined (d_ij = k). Defaults give the 80-node network.
CommunitySpec path_of_cliques(int n_cells = 4, int k = 20);

// `n_cells` rings of `k` nodes on a complete quotient with d_ij = `cross`.
CommunitySpec ring_family(int k, int n_cells = 40, int cross = 2);

// N-node `degree`-regular graph made of cliques of k nodes; the cross links
// form a circulant quotient with d_ij = 1. Requires k | N and
// k - 1 <= degree.
CommunitySpec regular_cliques(int n_nodes, int degree, int k);

}  // namespace qsis::catalog
