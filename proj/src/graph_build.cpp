#include "phast/graph_build.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "phast/threading.hpp"

namespace phast {

namespace {

struct EdgeRec {
  int src, dst;
  std::array<int, 3> off;
  double dist;
};

bool edge_order(const EdgeRec& a, const EdgeRec& b) {
  if (a.src != b.src) return a.src < b.src;
  if (a.dst != b.dst) return a.dst < b.dst;
  return a.off < b.off;
}

// Perpendicular height of the cell along axis k: volume over the area of the
// face spanned by the other two lattice vectors.
double cell_height(const Cell& cell, int k) {
  const Eigen::Vector3d a = cell.row((k + 1) % 3);
  const Eigen::Vector3d b = cell.row((k + 2) % 3);
  const double area = a.cross(b).norm();
  if (area <= 0.0) return 0.0;
  return std::abs(cell.determinant()) / area;
}

}  // namespace

Graph build_radius_graph(const AtomicSystem& system, const GraphBuildConfig& config) {
  if (config.cutoff <= 0.0) throw std::invalid_argument("build_radius_graph: cutoff must be > 0");
  if (config.max_neighbors && *config.max_neighbors < 1)
    throw std::invalid_argument("build_radius_graph: max_neighbors must be >= 1");

  const int n = system.size();
  std::array<bool, 3> periodic{};
  std::array<int, 3> range{0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    periodic[k] = config.enforce_pbc && system.pbc[k];
    if (!periodic[k]) continue;
    const double h = cell_height(system.cell, k);
    if (h <= 0.0)
      throw std::invalid_argument("build_radius_graph: periodic direction " + std::to_string(k) +
                                  " requires an invertible cell");
    range[k] = static_cast<int>(std::ceil(config.cutoff / h));
  }

  std::vector<EdgeRec> edges;
  const double cutoff2 = config.cutoff * config.cutoff;
  for (int i = 0; i < n; ++i) {
    const Eigen::RowVector3d xi = system.positions.row(i);
    for (int j = 0; j < n; ++j) {
      const Eigen::RowVector3d xj = system.positions.row(j);
      for (int ox = -range[0]; ox <= range[0]; ++ox) {
        for (int oy = -range[1]; oy <= range[1]; ++oy) {
          for (int oz = -range[2]; oz <= range[2]; ++oz) {
            if (i == j && ox == 0 && oy == 0 && oz == 0) continue;
            const Eigen::RowVector3d shift = Eigen::RowVector3d(ox, oy, oz) * system.cell;
            const double d2 = (xj + shift - xi).squaredNorm();
            if (d2 > 0.0 && d2 <= cutoff2)
              edges.push_back({i, j, {ox, oy, oz}, std::sqrt(d2)});
          }
        }
      }
    }
  }

  if (config.max_neighbors) {
    // Keep the max_neighbors nearest incoming edges per receiver (dst).
    std::vector<std::vector<int>> incoming(n);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
      incoming[edges[e].dst].push_back(e);
    std::vector<char> keep(edges.size(), 0);
    const int cap = *config.max_neighbors;
    for (int v = 0; v < n; ++v) {
      auto& in = incoming[v];
      std::sort(in.begin(), in.end(), [&](int a, int b) {
        if (edges[a].dist != edges[b].dist) return edges[a].dist < edges[b].dist;
        if (edges[a].off != edges[b].off) return edges[a].off < edges[b].off;
        return edges[a].src < edges[b].src;
      });
      for (int r = 0; r < cap && r < static_cast<int>(in.size()); ++r) keep[in[r]] = 1;
    }
    std::vector<EdgeRec> kept;
    kept.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (keep[e]) kept.push_back(edges[e]);
    edges = std::move(kept);
  }

  std::sort(edges.begin(), edges.end(), edge_order);

  Graph g;
  g.num_nodes = n;
  g.cutoff = config.cutoff;
  const int e = static_cast<int>(edges.size());
  g.src.resize(e);
  g.dst.resize(e);
  g.offsets.resize(e, 3);
  g.distances.resize(e);
  for (int k = 0; k < e; ++k) {
    g.src(k) = edges[k].src;
    g.dst(k) = edges[k].dst;
    g.offsets(k, 0) = edges[k].off[0];
    g.offsets(k, 1) = edges[k].off[1];
    g.offsets(k, 2) = edges[k].off[2];
    g.distances(k) = edges[k].dist;
  }
  return g;
}

std::vector<Graph> build_radius_graphs(const std::vector<AtomicSystem>& systems,
                                       const GraphBuildConfig& config) {
  std::vector<Graph> graphs(systems.size());
  parallel_for(systems.size(), [&](std::size_t i) { graphs[i] = build_radius_graph(systems[i], config); });
  return graphs;
}

}  // namespace phast
