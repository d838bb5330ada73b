#include "phast/rewire.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "phast/threading.hpp"

namespace phast {

namespace {

struct EdgeRec {
  int src, dst;
  std::array<int, 3> off;
  double dist;
};

Graph edges_to_graph(std::vector<EdgeRec> edges, int num_nodes, double cutoff) {
  std::sort(edges.begin(), edges.end(), [](const EdgeRec& a, const EdgeRec& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return a.off < b.off;
  });
  Graph g;
  g.num_nodes = num_nodes;
  g.cutoff = cutoff;
  const int e = static_cast<int>(edges.size());
  g.src.resize(e);
  g.dst.resize(e);
  g.offsets.resize(e, 3);
  g.distances.resize(e);
  for (int k = 0; k < e; ++k) {
    g.src(k) = edges[k].src;
    g.dst(k) = edges[k].dst;
    for (int c = 0; c < 3; ++c) g.offsets(k, c) = edges[k].off[c];
    g.distances(k) = edges[k].dist;
  }
  return g;
}

AtomicSystem filter_system(const AtomicSystem& s, const std::vector<bool>& keep) {
  const int n = s.size();
  int m = 0;
  for (int i = 0; i < n; ++i) m += keep[i];
  AtomicSystem out;
  out.positions.resize(m, 3);
  out.atomic_numbers.resize(m);
  out.tags.resize(m);
  out.cell = s.cell;
  out.pbc = s.pbc;
  out.energy = s.energy;
  out.sample_id = s.sample_id;
  if (s.forces) {
    out.forces = Positions(m, 3);
  }
  std::vector<int> new_index(n, -1);
  int w = 0;
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    out.positions.row(w) = s.positions.row(i);
    out.atomic_numbers(w) = s.atomic_numbers(i);
    out.tags(w) = s.tags(i);
    if (s.forces) out.forces->row(w) = s.forces->row(i);
    new_index[i] = w++;
  }
  for (const auto& [idx, card] : s.supernode_cardinality)
    if (keep[idx]) out.supernode_cardinality[new_index[idx]] = card;
  for (const auto& [idx, comp] : s.supernode_composition)
    if (keep[idx]) out.supernode_composition[new_index[idx]] = comp;
  return out;
}

// Shared machinery for the two supernode strategies: groups is a list of
// (atomic_number for the new node, member indices).
std::pair<AtomicSystem, Graph> aggregate_groups(
    const AtomicSystem& s, const Graph& g,
    const std::vector<std::pair<int, std::vector<int>>>& groups) {
  const int n = s.size();
  std::vector<bool> keep(n, true);
  for (const auto& [z, members] : groups)
    for (int i : members) keep[i] = false;

  AtomicSystem out = filter_system(s, keep);
  const int survivors = out.size();
  std::vector<int> new_index(n, -1);
  {
    int w = 0;
    for (int i = 0; i < n; ++i)
      if (keep[i]) new_index[i] = w++;
  }

  const int num_groups = static_cast<int>(groups.size());
  const int total = survivors + num_groups;
  {
    Positions pos(total, 3);
    IndexVector zs(total), tags(total);
    pos.topRows(survivors) = out.positions;
    zs.head(survivors) = out.atomic_numbers;
    tags.head(survivors) = out.tags;
    std::optional<Positions> forces;
    if (out.forces) {
      forces = Positions::Zero(total, 3);
      forces->topRows(survivors) = *out.forces;
    }
    for (int k = 0; k < num_groups; ++k) {
      const auto& members = groups[k].second;
      Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
      for (int i : members) mean += s.positions.row(i);
      mean /= static_cast<double>(members.size());
      const int node = survivors + k;
      pos.row(node) = mean;
      zs(node) = groups[k].first;
      tags(node) = 0;
      out.supernode_cardinality[node] = static_cast<int>(members.size());
      std::vector<int> comp;
      comp.reserve(members.size());
      for (int i : members) comp.push_back(s.atomic_numbers(i));
      out.supernode_composition[node] = std::move(comp);
    }
    out.positions = std::move(pos);
    out.atomic_numbers = std::move(zs);
    out.tags = std::move(tags);
    out.forces = std::move(forces);
  }

  // Which group each removed node belongs to.
  std::vector<int> group_of(n, -1);
  for (int k = 0; k < num_groups; ++k)
    for (int i : groups[k].second) group_of[i] = k;

  std::vector<EdgeRec> edges;
  // survivor-survivor edges carry over; survivor<->group adjacency is the
  // boolean max over the aggregated set.
  std::set<std::pair<int, int>> to_group;    // (survivor new index, group)
  std::set<std::pair<int, int>> from_group;  // (group, survivor new index)
  for (int e = 0; e < g.num_edges(); ++e) {
    const int a = g.src(e), b = g.dst(e);
    const bool ka = keep[a], kb = keep[b];
    if (ka && kb) {
      edges.push_back({new_index[a], new_index[b],
                       {g.offsets(e, 0), g.offsets(e, 1), g.offsets(e, 2)},
                       g.distances(e)});
    } else if (ka && !kb) {
      to_group.insert({new_index[a], group_of[b]});
    } else if (!ka && kb) {
      from_group.insert({group_of[a], new_index[b]});
    }
    // removed-removed edges vanish (no supernode self loops)
  }
  for (const auto& [i, k] : to_group) {
    const int sn = survivors + k;
    const double d = (out.positions.row(sn) - out.positions.row(i)).norm();
    edges.push_back({i, sn, {0, 0, 0}, d});
  }
  for (const auto& [k, i] : from_group) {
    const int sn = survivors + k;
    const double d = (out.positions.row(i) - out.positions.row(sn)).norm();
    edges.push_back({sn, i, {0, 0, 0}, d});
  }
  // all distinct supernode pairs are mutually connected
  for (int k1 = 0; k1 < num_groups; ++k1) {
    for (int k2 = 0; k2 < num_groups; ++k2) {
      if (k1 == k2) continue;
      const int a = survivors + k1, b = survivors + k2;
      const double d = (out.positions.row(b) - out.positions.row(a)).norm();
      edges.push_back({a, b, {0, 0, 0}, d});
    }
  }
  return {std::move(out), edges_to_graph(std::move(edges), total, g.cutoff)};
}

}  // namespace

std::string to_string(RewireKind kind) {
  switch (kind) {
    case RewireKind::none: return "none";
    case RewireKind::remove_tag0: return "remove-tag0";
    case RewireKind::supernode_per_graph: return "supernode-per-graph";
    case RewireKind::supernode_per_atom_type: return "supernode-per-atom-type";
  }
  return "none";
}

RewireKind rewire_kind_from_string(const std::string& name) {
  if (name == "none") return RewireKind::none;
  if (name == "remove-tag0" || name == "remove_tag0") return RewireKind::remove_tag0;
  if (name == "supernode-per-graph" || name == "supernode_per_graph" || name == "sn-graph")
    return RewireKind::supernode_per_graph;
  if (name == "supernode-per-atom-type" || name == "supernode_per_atom_type" ||
      name == "sn-atom-type")
    return RewireKind::supernode_per_atom_type;
  throw std::invalid_argument("unknown rewire strategy: " + name);
}

AtomicSystem remove_tag0(const AtomicSystem& system) {
  const int n = system.size();
  std::vector<bool> keep(n);
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    keep[i] = system.tags(i) != 0;
    kept += keep[i];
  }
  if (kept == n) return system;
  if (kept == 0) throw std::runtime_error("remove_tag0: all atoms carry tag 0");
  return filter_system(system, keep);
}

Graph filter_graph(const Graph& graph, const std::vector<bool>& keep) {
  const int n = graph.num_nodes;
  std::vector<int> new_index(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (keep[i]) new_index[i] = m++;
  std::vector<EdgeRec> edges;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const int a = graph.src(e), b = graph.dst(e);
    if (!keep[a] || !keep[b]) continue;
    edges.push_back({new_index[a], new_index[b],
                     {graph.offsets(e, 0), graph.offsets(e, 1), graph.offsets(e, 2)},
                     graph.distances(e)});
  }
  return edges_to_graph(std::move(edges), m, graph.cutoff);
}

std::pair<AtomicSystem, Graph> supernode_per_graph(const AtomicSystem& system, const Graph& graph) {
  std::vector<int> members;
  for (int i = 0; i < system.size(); ++i)
    if (system.tags(i) == 0) members.push_back(i);
  if (members.empty()) throw std::runtime_error("supernode_per_graph: no tag-0 atoms");
  return aggregate_groups(system, graph, {{kSupernodeCode, std::move(members)}});
}

std::pair<AtomicSystem, Graph> supernode_per_atom_type(const AtomicSystem& system,
                                                       const Graph& graph) {
  std::map<int, std::vector<int>> by_element;  // ordered by atomic number
  for (int i = 0; i < system.size(); ++i)
    if (system.tags(i) == 0) by_element[system.atomic_numbers(i)].push_back(i);
  if (by_element.empty()) throw std::runtime_error("supernode_per_atom_type: no tag-0 atoms");
  std::vector<std::pair<int, std::vector<int>>> groups;
  groups.reserve(by_element.size());
  for (auto& [z, members] : by_element) groups.emplace_back(z, std::move(members));
  return aggregate_groups(system, graph, groups);
}

Vector cardinality_encoding(int cardinality, int dim) {
  if (dim < 2 || dim % 2 != 0)
    throw std::invalid_argument("cardinality_encoding: dim must be even and >= 2");
  if (cardinality < 1) throw std::invalid_argument("cardinality_encoding: cardinality must be >= 1");
  Vector out(dim);
  for (int m = 0; 2 * m < dim; ++m) {
    const double angle = cardinality / std::pow(10000.0, (2.0 * m) / dim);
    out(2 * m) = std::sin(angle);
    out(2 * m + 1) = std::cos(angle);
  }
  return out;
}

std::pair<AtomicSystem, Graph> apply_rewire(const AtomicSystem& system, const Graph& graph,
                                            RewireStrategy strategy,
                                            const GraphBuildConfig& build) {
  const bool has_tag0 = (system.tags.array() == 0).any();
  switch (strategy.kind) {
    case RewireKind::none:
      return {system, graph};
    case RewireKind::remove_tag0: {
      AtomicSystem filtered = remove_tag0(system);
      Graph g = build_radius_graph(filtered, build);
      return {std::move(filtered), std::move(g)};
    }
    case RewireKind::supernode_per_graph:
      if (!has_tag0) return {system, graph};
      return supernode_per_graph(system, graph);
    case RewireKind::supernode_per_atom_type:
      if (!has_tag0) return {system, graph};
      return supernode_per_atom_type(system, graph);
  }
  return {system, graph};
}

RewiringStats rewiring_stats(const std::vector<AtomicSystem>& dataset, RewireStrategy strategy,
                             const GraphBuildConfig& build) {
  if (dataset.empty()) throw std::invalid_argument("rewiring_stats: empty dataset");
  RewiringStats stats;
  stats.per_sample.resize(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    const AtomicSystem& s = dataset[i];
    const Graph g = build_radius_graph(s, build);
    const auto [rs, rg] = apply_rewire(s, g, strategy, build);
    stats.per_sample[i] = {s.sample_id, s.size(), rs.size(), g.num_edges(), rg.num_edges()};
  });
  long nodes_before = 0, nodes_after = 0, edges_before = 0, edges_after = 0;
  for (const auto& row : stats.per_sample) {
    nodes_before += row.nodes_before;
    nodes_after += row.nodes_after;
    edges_before += row.edges_before;
    edges_after += row.edges_after;
  }
  stats.atoms_remaining_pct = nodes_before ? 100.0 * nodes_after / nodes_before : 0.0;
  stats.edges_remaining_pct = edges_before ? 100.0 * edges_after / edges_before : 0.0;
  return stats;
}

void write_rewiring_stats_csv(const RewiringStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "sample_id,nodes_before,nodes_after,edges_before,edges_after\n";
  for (const auto& r : stats.per_sample)
    out << r.sample_id << ',' << r.nodes_before << ',' << r.nodes_after << ',' << r.edges_before
        << ',' << r.edges_after << '\n';
}

}  // namespace phast
