#pragma once

#include <string>
#include <vector>

#include "phast/graph_build.hpp"
#include "phast/types.hpp"

namespace phast {

enum class RewireKind { none, remove_tag0, supernode_per_graph, supernode_per_atom_type };

struct RewireStrategy {
  RewireKind kind = RewireKind::none;
};

std::string to_string(RewireKind kind);
// Accepts the CLI spellings: none, remove-tag0, supernode-per-graph,
// supernode-per-atom-type. Throws on anything else.
RewireKind rewire_kind_from_string(const std::string& name);

// Drops every tag-0 atom, filtering positions, numbers, tags and force labels
// consistently. Returns the system unchanged when nothing carries tag 0.
// Throws if the result would be empty.
AtomicSystem remove_tag0(const AtomicSystem& system);

// Restriction of a graph to the nodes where keep[i] is true, with indices
// remapped densely. Used to check that filtering a prebuilt graph matches
// rebuilding from the filtered system.
Graph filter_graph(const Graph& graph, const std::vector<bool>& keep);

// Aggregates all tag-0 atoms into one node at their mean position with
// atomic number kSupernodeCode and tag 0. A regular node connects to the
// supernode iff it had any edge to the aggregated set (boolean max), with
// zero offsets and recomputed distances. Throws if no atom has tag 0.
std::pair<AtomicSystem, Graph> supernode_per_graph(const AtomicSystem& system, const Graph& graph);

// Same, but one supernode per distinct tag-0 element (keeping the element's
// atomic number). All supernode pairs are mutually connected; no self loops.
std::pair<AtomicSystem, Graph> supernode_per_atom_type(const AtomicSystem& system,
                                                       const Graph& graph);

// Sinusoidal encoding of a supernode's cardinality:
// out[2m] = sin(c / 10000^(2m/dim)), out[2m+1] = cos(same). dim even, >= 2.
Vector cardinality_encoding(int cardinality, int dim);

// Applies a strategy to a (system, graph) pair. Supernode strategies fall
// back to the unchanged pair when the system has no tag-0 atoms.
std::pair<AtomicSystem, Graph> apply_rewire(const AtomicSystem& system, const Graph& graph,
                                            RewireStrategy strategy,
                                            const GraphBuildConfig& build);

struct RewiringSample {
  std::string sample_id;
  int nodes_before = 0, nodes_after = 0;
  int edges_before = 0, edges_after = 0;
};

struct RewiringStats {
  double atoms_remaining_pct = 0.0;  // aggregated over the dataset
  double edges_remaining_pct = 0.0;
  std::vector<RewiringSample> per_sample;
};

RewiringStats rewiring_stats(const std::vector<AtomicSystem>& dataset, RewireStrategy strategy,
                             const GraphBuildConfig& build);

void write_rewiring_stats_csv(const RewiringStats& stats, const std::string& path);

}  // namespace phast
