#include "doctest.h"

#include <set>

#include "phast/rewire.hpp"
#include "testing_util.hpp"

using namespace phast;
using namespace phast::testing;

namespace {

AtomicSystem tagged_system() {
  AtomicSystem s;
  s.positions.resize(4, 3);
  s.positions << 0, 0, 0, 1.5, 0, 0, 0, 1.5, 0, 1.5, 1.5, 0;
  s.atomic_numbers.resize(4);
  s.atomic_numbers << 8, 1, 29, 29;
  s.tags.resize(4);
  s.tags << 2, 1, 0, 0;
  s.sample_id = "tagged";
  return s;
}

int count_tag0(const AtomicSystem& s) { return (s.tags.array() == 0).count(); }

}  // namespace

TEST_CASE("remove_tag0 filters rows consistently") {
  AtomicSystem s = tagged_system();
  s.forces = Positions::Random(4, 3);
  const AtomicSystem r = remove_tag0(s);
  REQUIRE(r.size() == 2);
  CHECK(r.tags(0) == 2);
  CHECK(r.tags(1) == 1);
  CHECK(r.positions.row(0) == s.positions.row(0));
  CHECK(r.positions.row(1) == s.positions.row(1));
  CHECK(r.atomic_numbers(0) == 8);
  CHECK(r.forces->row(1) == s.forces->row(1));
}

TEST_CASE("remove_tag0 without tag-0 atoms is the identity") {
  AtomicSystem s = tagged_system();
  s.tags << 2, 1, 1, 1;
  const AtomicSystem r = remove_tag0(s);
  CHECK(r.positions == s.positions);
  CHECK(r.tags == s.tags);
}

TEST_CASE("remove_tag0 on an all-tag0 system throws") {
  AtomicSystem s = tagged_system();
  s.tags.setZero();
  CHECK_THROWS(remove_tag0(s));
}

TEST_CASE("remove_tag0 is idempotent") {
  const AtomicSystem once = remove_tag0(tagged_system());
  const AtomicSystem twice = remove_tag0(once);
  CHECK(once.positions == twice.positions);
  CHECK(once.tags == twice.tags);
}

TEST_CASE("filter-then-build equals build-then-filter") {
  Rng rng(31);
  const GraphBuildConfig cfg{.cutoff = 5.0};
  for (int trial = 0; trial < 30; ++trial) {
    AtomicSystem s = random_system(rng, 5, 20);
    if (count_tag0(s) == 0 || count_tag0(s) == s.size()) continue;
    const Graph full = build_radius_graph(s, cfg);
    std::vector<bool> keep(s.size());
    for (int i = 0; i < s.size(); ++i) keep[i] = s.tags(i) != 0;
    const Graph filtered = filter_graph(full, keep);
    const Graph rebuilt = build_radius_graph(remove_tag0(s), cfg);
    REQUIRE(filtered.num_edges() == rebuilt.num_edges());
    CHECK(filtered.src == rebuilt.src);
    CHECK(filtered.dst == rebuilt.dst);
    CHECK(filtered.offsets == rebuilt.offsets);
    CHECK(filtered.distances == rebuilt.distances);
  }
}

TEST_CASE("single tag-0 atom becomes a supernode at its own position") {
  AtomicSystem s = tagged_system();
  s.tags << 2, 1, 1, 0;
  const Graph g = build_radius_graph(s, {.cutoff = 6.0, .enforce_pbc = false});
  const auto [rs, rg] = supernode_per_graph(s, g);
  REQUIRE(rs.size() == 4);
  const int sn = 3;
  CHECK(rs.atomic_numbers(sn) == kSupernodeCode);
  CHECK(rs.tags(sn) == 0);
  CHECK(rs.positions.row(sn) == s.positions.row(3));
  REQUIRE(rs.supernode_cardinality.count(sn));
  CHECK(rs.supernode_cardinality.at(sn) == 1);
}

TEST_CASE("supernode position is the mean of the aggregated atoms") {
  AtomicSystem s;
  s.positions.resize(4, 3);
  s.positions << 0, 0, 0, 3, 0, 0, 0, 3, 0, 1, 1, 5;
  s.atomic_numbers.setConstant(4, 13);
  s.tags.resize(4);
  s.tags << 0, 0, 0, 2;
  const Graph g = build_radius_graph(s, {.cutoff = 6.0, .enforce_pbc = false});
  const auto [rs, rg] = supernode_per_graph(s, g);

  // independent summation oracle
  Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
  int count = 0;
  for (int i = 0; i < 4; ++i)
    if (s.tags(i) == 0) {
      mean += s.positions.row(i);
      ++count;
    }
  mean /= count;
  REQUIRE(rs.size() == 2);
  CHECK((rs.positions.row(1) - mean).norm() < 1e-12);
  CHECK(rs.positions.row(1) == Eigen::RowVector3d(1, 1, 0));
  CHECK(rs.supernode_cardinality.at(1) == 3);
}

TEST_CASE("multiple edges into the aggregated set collapse to one supernode edge") {
  AtomicSystem s;
  s.positions.resize(3, 3);
  s.positions << 0, 0, 0, 2, 0, 0, -2, 0, 0;  // tag-1 atom bonded to two tag-0 atoms
  s.atomic_numbers.setConstant(3, 29);
  s.tags.resize(3);
  s.tags << 1, 0, 0;
  const Graph g = build_radius_graph(s, {.cutoff = 3.0, .enforce_pbc = false});
  const auto [rs, rg] = supernode_per_graph(s, g);
  int to_sn = 0, from_sn = 0, self_loops = 0;
  for (int e = 0; e < rg.num_edges(); ++e) {
    if (rg.src(e) == 1 && rg.dst(e) == 1) ++self_loops;
    else if (rg.dst(e) == 1) ++to_sn;
    else if (rg.src(e) == 1) ++from_sn;
  }
  CHECK(to_sn == 1);
  CHECK(from_sn == 1);
  CHECK(self_loops == 0);
  // supernode sits at the mean (0,0,0) which collides with atom 0; the edge
  // distance is recomputed from that mean
  CHECK(rg.distances(0) == doctest::Approx(0.0));
}

TEST_CASE("per-type supernodes: one per distinct tag-0 element, fully interconnected") {
  AtomicSystem s;
  s.positions.resize(5, 3);
  s.positions << 0, 0, 0, 2, 0, 0, 0, 2, 0, 2, 2, 0, 1, 1, 3;
  s.atomic_numbers.resize(5);
  s.atomic_numbers << 13, 13, 78, 78, 1;
  s.tags.resize(5);
  s.tags << 0, 0, 0, 0, 2;
  const Graph g = build_radius_graph(s, {.cutoff = 4.0, .enforce_pbc = false});
  const auto [rs, rg] = supernode_per_atom_type(s, g);
  REQUIRE(rs.size() == 3);  // adsorbate + 2 supernodes
  CHECK(rs.atomic_numbers(1) == 13);
  CHECK(rs.atomic_numbers(2) == 78);
  CHECK(rs.supernode_cardinality.at(1) == 2);
  CHECK(rs.supernode_cardinality.at(2) == 2);
  int inter = 0;
  for (int e = 0; e < rg.num_edges(); ++e) {
    CHECK_FALSE(rg.src(e) == rg.dst(e));
    if (rg.src(e) >= 1 && rg.dst(e) >= 1) ++inter;
  }
  CHECK(inter == 2);  // one directed pair between the two supernodes
}

TEST_CASE("per-type on a single-element subsurface matches per-graph up to the atom code") {
  AtomicSystem s = tagged_system();
  const Graph g = build_radius_graph(s, {.cutoff = 6.0, .enforce_pbc = false});
  const auto [a_sys, a_g] = supernode_per_graph(s, g);
  const auto [b_sys, b_g] = supernode_per_atom_type(s, g);
  CHECK(a_sys.positions == b_sys.positions);
  CHECK(a_sys.tags == b_sys.tags);
  CHECK(a_sys.atomic_numbers(2) == kSupernodeCode);
  CHECK(b_sys.atomic_numbers(2) == 29);
  CHECK(a_g.src == b_g.src);
  CHECK(a_g.dst == b_g.dst);
  CHECK(a_g.distances == b_g.distances);
}

TEST_CASE("per-type supernode count and inter-edges on random systems") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    AtomicSystem s = random_system(rng, 8, 16);
    // force exactly three distinct tag-0 elements
    for (int i = 0; i < s.size(); ++i) s.tags(i) = i < 6 ? 0 : 1 + (i % 2);
    s.atomic_numbers(0) = s.atomic_numbers(1) = 13;
    s.atomic_numbers(2) = s.atomic_numbers(3) = 29;
    s.atomic_numbers(4) = s.atomic_numbers(5) = 78;
    const Graph g = build_radius_graph(s, {.cutoff = 5.0});
    const auto [rs, rg] = supernode_per_atom_type(s, g);

    // brute-force enumeration oracle
    std::set<int> elements;
    for (int i = 0; i < s.size(); ++i)
      if (s.tags(i) == 0) elements.insert(s.atomic_numbers(i));
    CHECK(static_cast<int>(rs.supernode_cardinality.size()) == 3);
    CHECK(rs.size() == s.size() - 6 + static_cast<int>(elements.size()));
    int inter = 0;
    for (int e = 0; e < rg.num_edges(); ++e)
      if (rs.is_supernode(rg.src(e)) && rs.is_supernode(rg.dst(e))) ++inter;
    CHECK(inter == 6);  // 3 supernodes, all ordered pairs
  }
}

TEST_CASE("node accounting identities hold on random systems") {
  Rng rng(43);
  const GraphBuildConfig cfg{.cutoff = 5.0};
  for (int trial = 0; trial < 50; ++trial) {
    AtomicSystem s = random_system(rng, 4, 16);
    const int n = s.size();
    const int tag0 = count_tag0(s);
    if (tag0 == 0 || tag0 == n) continue;
    const Graph g = build_radius_graph(s, cfg);

    const AtomicSystem removed = remove_tag0(s);
    CHECK(removed.size() == n - tag0);

    const auto [sg_sys, sg_g] = supernode_per_graph(s, g);
    CHECK(sg_sys.size() == n - tag0 + 1);

    const auto [st_sys, st_g] = supernode_per_atom_type(s, g);
    std::set<int> elements;
    for (int i = 0; i < n; ++i)
      if (s.tags(i) == 0) elements.insert(s.atomic_numbers(i));
    CHECK(st_sys.size() == n - tag0 + static_cast<int>(elements.size()));

    // tags of survivors unchanged, in order
    int w = 0;
    for (int i = 0; i < n; ++i) {
      if (s.tags(i) == 0) continue;
      CHECK(removed.tags(w) == s.tags(i));
      CHECK(sg_sys.tags(w) == s.tags(i));
      ++w;
    }

    // no surviving edge references a node out of range
    for (int e = 0; e < sg_g.num_edges(); ++e) {
      CHECK(sg_g.src(e) < sg_sys.size());
      CHECK(sg_g.dst(e) < sg_sys.size());
    }
  }
}

TEST_CASE("edge reduction dominance: remove_tag0 <= supernode_per_graph <= 100") {
  Rng rng(47);
  const GraphBuildConfig cfg{.cutoff = 5.0};
  std::vector<AtomicSystem> dataset;
  for (int k = 0; k < 12; ++k) {
    AtomicSystem s = random_system(rng, 6, 14);
    if (count_tag0(s) == 0) s.tags(0) = 0;
    if (count_tag0(s) == s.size()) s.tags(0) = 1;
    dataset.push_back(s);
  }
  const auto removed = rewiring_stats(dataset, {RewireKind::remove_tag0}, cfg);
  const auto aggregated = rewiring_stats(dataset, {RewireKind::supernode_per_graph}, cfg);
  CHECK(removed.edges_remaining_pct <= aggregated.edges_remaining_pct + 1e-12);
  CHECK(aggregated.edges_remaining_pct <= 100.0 + 1e-12);
}

TEST_CASE("stats are all-100 when nothing carries tag 0") {
  Rng rng(53);
  std::vector<AtomicSystem> dataset;
  for (int k = 0; k < 4; ++k) {
    AtomicSystem s = random_system(rng, 4, 8);
    for (int i = 0; i < s.size(); ++i) s.tags(i) = 1 + (i % 2);
    dataset.push_back(s);
  }
  const auto stats = rewiring_stats(dataset, {RewireKind::remove_tag0}, {.cutoff = 5.0});
  CHECK(stats.atoms_remaining_pct == doctest::Approx(100.0));
  CHECK(stats.edges_remaining_pct == doctest::Approx(100.0));
}

TEST_CASE("cardinality encoding instantiates the sinusoid formula") {
  const Vector v = cardinality_encoding(1, 4);
  REQUIRE(v.size() == 4);
  CHECK(v(0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(v(1) == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
  const double angle = 1.0 / std::sqrt(10000.0);
  CHECK(v(2) == doctest::Approx(std::sin(angle)).epsilon(1e-15));
  CHECK(v(3) == doctest::Approx(std::cos(angle)).epsilon(1e-15));
}

TEST_CASE("cardinality encoding is deterministic and injective up to 10^4") {
  CHECK(cardinality_encoding(17, 8) == cardinality_encoding(17, 8));
  // exhaustive distinctness check at dim 4: sort lexicographically, compare
  // adjacent entries
  const int dim = 4;
  std::vector<std::pair<std::array<double, 4>, int>> rows;
  rows.reserve(10000);
  for (int c = 1; c <= 10000; ++c) {
    const Vector v = cardinality_encoding(c, dim);
    rows.push_back({{v(0), v(1), v(2), v(3)}, c});
  }
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].first != rows[i - 1].first);
}

TEST_CASE("cardinality encoding rejects bad dimensions") {
  CHECK_THROWS(cardinality_encoding(1, 3));
  CHECK_THROWS(cardinality_encoding(1, 0));
  CHECK_THROWS(cardinality_encoding(0, 4));
}

TEST_CASE("apply_rewire falls back to the unchanged pair when inapplicable") {
  AtomicSystem s = tagged_system();
  s.tags << 2, 1, 1, 1;
  const Graph g = build_radius_graph(s, {.cutoff = 6.0, .enforce_pbc = false});
  const auto [rs, rg] = apply_rewire(s, g, {RewireKind::supernode_per_graph}, {.cutoff = 6.0});
  CHECK(rs.positions == s.positions);
  CHECK(rg.src == g.src);
}

TEST_CASE("strategy names round trip") {
  for (RewireKind k : {RewireKind::none, RewireKind::remove_tag0, RewireKind::supernode_per_graph,
                       RewireKind::supernode_per_atom_type})
    CHECK(rewire_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(rewire_kind_from_string("bogus"));
}
