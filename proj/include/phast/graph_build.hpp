#pragma once

#include <optional>
#include <vector>

#include "phast/types.hpp"

namespace phast {

struct GraphBuildConfig {
  double cutoff = 6.0;  // Angstrom
  std::optional<int> max_neighbors;
  bool enforce_pbc = true;
};

// Builds the directed cutoff graph of a system, including periodic images.
// For every ordered pair (i, j) and integer offset o restricted to the
// enabled periodic directions, the edge (i, j, o) is present iff
// 0 < |x_j + o*cell - x_i| <= cutoff. The offset search range per periodic
// axis k is ceil(cutoff / h_k), with h_k the perpendicular cell height along
// that axis. With max_neighbors set, each node keeps only its max_neighbors
// nearest incoming edges; ties break on (offset lexicographic, then source
// index) so the result is platform independent.
Graph build_radius_graph(const AtomicSystem& system, const GraphBuildConfig& config);

// Parallel across systems; output order matches input order.
std::vector<Graph> build_radius_graphs(const std::vector<AtomicSystem>& systems,
                                       const GraphBuildConfig& config);

}  // namespace phast
