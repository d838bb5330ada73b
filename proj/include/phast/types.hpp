#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Cell = Eigen::Matrix3d;  // rows are lattice vectors, Angstrom
using IndexVector = Eigen::VectorXi;
using OffsetMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3>;

// Atomic number assigned to the aggregate node created by the
// one-supernode-per-graph rewiring. Regular elements stay below it.
inline constexpr int kSupernodeCode = 119;
inline constexpr int kMaxAtomCode = 119;

// One adsorbate-catalyst sample. Tags follow the OC20 convention:
// 0 sub-surface, 1 surface, 2 adsorbate. Immutable by convention after
// construction; rewiring returns fresh copies.
struct AtomicSystem {
  Positions positions;       // N x 3, Angstrom
  IndexVector atomic_numbers;  // N
  IndexVector tags;            // N, values in {0,1,2}
  Cell cell = Cell::Identity();
  std::array<bool, 3> pbc = {false, false, false};
  std::optional<double> energy;        // eV
  std::optional<Positions> forces;     // N x 3, eV/Angstrom
  std::string sample_id;
  // Aggregate nodes only: node index -> number of atoms folded into it.
  std::map<int, int> supernode_cardinality;
  // Aggregate nodes only: node index -> atomic numbers of the folded atoms.
  // Needed to assemble property rows for nodes with code kSupernodeCode.
  std::map<int, std::vector<int>> supernode_composition;

  int size() const { return static_cast<int>(atomic_numbers.size()); }
  bool is_supernode(int i) const { return supernode_cardinality.count(i) > 0; }
};

// Directed cutoff graph with integer cell offsets. For edge e the cached
// distance satisfies distances[e] == |pos[dst[e]] + offsets[e]*cell - pos[src[e]]|.
// Edges are kept sorted by (src, dst, offset) so equal graphs compare equal.
struct Graph {
  int num_nodes = 0;
  IndexVector src;
  IndexVector dst;
  OffsetMatrix offsets;
  Vector distances;
  double cutoff = 0.0;  // construction cutoff, Angstrom

  int num_edges() const { return static_cast<int>(src.size()); }
};

struct Violation {
  std::string what;
  int index = -1;  // -1 when not tied to a node/edge
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_system(const AtomicSystem& system);

// Checks the Graph invariants against its owning system. Edges touching a
// supernode are exempt from the cutoff bound (their distance is recomputed
// from the mean position and may exceed it).
ValidationReport validate_graph(const Graph& graph, const AtomicSystem& system,
                                double distance_tol = 1e-9);

// Disjoint union of several (system, graph) pairs with node and edge indices
// offset into a single numbering.
struct Batch {
  std::vector<AtomicSystem> systems;
  std::vector<Graph> graphs;
  IndexVector node_graph_index;  // per node, non-decreasing

  // Concatenated views used by the models.
  Positions positions;          // M x 3
  IndexVector atomic_numbers;   // M
  IndexVector tags;             // M
  IndexVector src;              // batch edge endpoints
  IndexVector dst;
  Vector distances;
  Matrix offset_disp;           // E x 3, offsets * cell of the owning graph
  std::vector<int> node_base;   // per graph, first node index
  std::vector<int> edge_base;   // per graph, first edge index
  std::map<int, int> supernode_cardinality;           // batch node index -> cardinality
  std::map<int, std::vector<int>> supernode_composition;

  int num_nodes() const { return static_cast<int>(atomic_numbers.size()); }
  int num_edges() const { return static_cast<int>(src.size()); }
  int num_graphs() const { return static_cast<int>(graphs.size()); }
};

Batch make_batch(const std::vector<AtomicSystem>& systems, const std::vector<Graph>& graphs);

// Exact inverse of make_batch.
std::vector<std::pair<AtomicSystem, Graph>> unbatch(const Batch& batch);

// Element symbols for Z in [1, 118]; "X<z>" outside the range.
std::string element_symbol(int z);
// Returns 0 for unknown symbols.
int element_number(const std::string& symbol);

}  // namespace phast
