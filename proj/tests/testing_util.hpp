#pragma once

#include <cmath>
#include <vector>

#include "phast/graph_build.hpp"
#include "phast/rng.hpp"
#include "phast/types.hpp"

namespace phast::testing {

// Random cell with controlled skew so perpendicular heights stay ~2.5 A or
// more and offset searches stay small.
inline Cell random_cell(Rng& rng) {
  Cell cell = Cell::Zero();
  for (int k = 0; k < 3; ++k) {
    cell(k, k) = rng.uniform(4.0, 9.0);
    for (int c = 0; c < 3; ++c)
      if (c != k) cell(k, c) = rng.uniform(-0.8, 0.8);
  }
  return cell;
}

inline AtomicSystem random_system(Rng& rng, int min_atoms = 2, int max_atoms = 12,
                                  bool random_pbc = true) {
  AtomicSystem s;
  const int n = rng.uniform_int(min_atoms, max_atoms);
  s.cell = random_cell(rng);
  for (int k = 0; k < 3; ++k) s.pbc[k] = random_pbc ? (rng.uniform() < 0.5) : false;
  s.positions.resize(n, 3);
  s.atomic_numbers.resize(n);
  s.tags.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVector3d frac(rng.uniform(), rng.uniform(), rng.uniform());
    s.positions.row(i) = frac * s.cell;
    s.atomic_numbers(i) = rng.uniform_int(1, 90);
    s.tags(i) = rng.uniform_int(0, 2);
  }
  s.sample_id = "random";
  return s;
}

struct OracleEdge {
  int src, dst;
  std::array<int, 3> off;
  double dist;
  bool operator<(const OracleEdge& o) const {
    if (src != o.src) return src < o.src;
    if (dst != o.dst) return dst < o.dst;
    return off < o.off;
  }
  bool operator==(const OracleEdge& o) const {
    return src == o.src && dst == o.dst && off == o.off;
  }
};

// Independent brute force: enumerates every integer offset triple with
// |component| <= range over all ordered pairs. Deliberately dumb.
inline std::vector<OracleEdge> brute_force_edges(const AtomicSystem& s, double cutoff, int range) {
  std::vector<OracleEdge> edges;
  const int n = s.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int ox = -range; ox <= range; ++ox)
        for (int oy = -range; oy <= range; ++oy)
          for (int oz = -range; oz <= range; ++oz) {
            if (!s.pbc[0] && ox != 0) continue;
            if (!s.pbc[1] && oy != 0) continue;
            if (!s.pbc[2] && oz != 0) continue;
            if (i == j && ox == 0 && oy == 0 && oz == 0) continue;
            const Eigen::RowVector3d shift = Eigen::RowVector3d(ox, oy, oz) * s.cell;
            const double d = (s.positions.row(j) + shift - s.positions.row(i)).norm();
            if (d > 0.0 && d <= cutoff) edges.push_back({i, j, {ox, oy, oz}, d});
          }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Offset range for the brute force: ceil(cutoff / min perpendicular height),
// padded by one to over-cover.
inline int brute_force_range(const AtomicSystem& s, double cutoff) {
  double hmin = 1e300;
  for (int k = 0; k < 3; ++k) {
    if (!s.pbc[k]) continue;
    const Eigen::Vector3d a = s.cell.row((k + 1) % 3);
    const Eigen::Vector3d b = s.cell.row((k + 2) % 3);
    const double h = std::abs(s.cell.determinant()) / a.cross(b).norm();
    hmin = std::min(hmin, h);
  }
  if (hmin == 1e300) return 0;
  return static_cast<int>(std::ceil(cutoff / hmin)) + 1;
}

inline std::vector<OracleEdge> graph_to_edges(const Graph& g) {
  std::vector<OracleEdge> edges;
  for (int e = 0; e < g.num_edges(); ++e)
    edges.push_back({g.src(e), g.dst(e), {g.offsets(e, 0), g.offsets(e, 1), g.offsets(e, 2)},
                     g.distances(e)});
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Random orthogonal 3x3 via Gram-Schmidt on a Gaussian matrix; det is +-1
// with equal probability, so reflections are covered.
inline Eigen::Matrix3d random_orthogonal(Rng& rng) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
  Eigen::Matrix3d q = qr.householderQ();
  if (rng.uniform() < 0.5) q.col(0) = -q.col(0);
  return q;
}

// Rigid motion applied to a system: positions x -> x R + t, cell rows -> row R.
inline AtomicSystem transform_system(const AtomicSystem& s, const Eigen::Matrix3d& rot,
                                     const Eigen::RowVector3d& trans) {
  AtomicSystem out = s;
  out.positions = (s.positions * rot).rowwise() + trans;
  out.cell = s.cell * rot;
  if (s.forces) out.forces = (*s.forces) * rot;
  return out;
}

}  // namespace phast::testing
