#include "doctest.h"

#include "phast/graph_build.hpp"
#include "phast/types.hpp"
#include "testing_util.hpp"

using namespace phast;

namespace {

AtomicSystem two_atom_system() {
  AtomicSystem s;
  s.positions.resize(2, 3);
  s.positions << 0, 0, 0, 1, 0, 0;
  s.atomic_numbers.resize(2);
  s.atomic_numbers << 1, 8;
  s.tags.resize(2);
  s.tags << 2, 1;
  s.sample_id = "pair";
  return s;
}

}  // namespace

TEST_CASE("well-formed minimal system validates") {
  const auto report = validate_system(two_atom_system());
  CHECK(report.ok());
}

TEST_CASE("tag outside {0,1,2} is reported with its index") {
  AtomicSystem s = two_atom_system();
  s.tags(1) = 3;
  const auto report = validate_system(s);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].what == "tag out of {0,1,2} at index 1");
  CHECK(report.violations[0].index == 1);
}

TEST_CASE("singular cell with pbc enabled is a violation") {
  AtomicSystem s = two_atom_system();
  s.pbc = {true, true, false};
  s.cell.setZero();
  s.cell(0, 0) = 1.0;
  s.cell(1, 0) = 2.0;  // rows 0 and 1 parallel
  const auto report = validate_system(s);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) found |= v.what == "cell not invertible";
  CHECK(found);
}

TEST_CASE("force label row mismatch is a violation") {
  AtomicSystem s = two_atom_system();
  s.forces = Positions::Zero(3, 3);
  CHECK_FALSE(validate_system(s).ok());
}

TEST_CASE("validate_system is pure") {
  AtomicSystem s = two_atom_system();
  s.tags(0) = 3;
  const auto a = validate_system(s);
  const auto b = validate_system(s);
  REQUIRE(a.violations.size() == b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) {
    CHECK(a.violations[i].what == b.violations[i].what);
    CHECK(a.violations[i].index == b.violations[i].index);
  }
}

TEST_CASE("single graph batch indexes every node to graph 0") {
  AtomicSystem s = two_atom_system();
  AtomicSystem s3 = s;
  s3.positions.conservativeResize(3, 3);
  s3.positions.row(2) << 0, 2, 0;
  s3.atomic_numbers.conservativeResize(3);
  s3.atomic_numbers(2) = 6;
  s3.tags.conservativeResize(3);
  s3.tags(2) = 0;
  const Graph g = build_radius_graph(s3, {.cutoff = 6.0, .enforce_pbc = false});
  const Batch b = make_batch({s3}, {g});
  REQUIRE(b.node_graph_index.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(b.node_graph_index(i) == 0);
}

TEST_CASE("two-system batch counts nodes per graph") {
  Rng rng(7);
  AtomicSystem a = testing::random_system(rng, 2, 2, false);
  AtomicSystem b = testing::random_system(rng, 3, 3, false);
  const GraphBuildConfig cfg{.cutoff = 6.0, .enforce_pbc = false};
  const Batch batch = make_batch({a, b}, {build_radius_graph(a, cfg), build_radius_graph(b, cfg)});
  REQUIRE(batch.node_graph_index.size() == 5);
  const std::vector<int> expect = {0, 0, 1, 1, 1};
  for (int i = 0; i < 5; ++i) CHECK(batch.node_graph_index(i) == expect[i]);
}

// Brute-force re-indexer: recompute each batch edge from scratch using the
// per-graph node bases and compare.
TEST_CASE("batch edge indices match a brute-force re-indexer") {
  Rng rng(11);
  std::vector<AtomicSystem> systems;
  std::vector<Graph> graphs;
  const GraphBuildConfig cfg{.cutoff = 4.0, .enforce_pbc = true};
  for (int k = 0; k < 4; ++k) {
    systems.push_back(testing::random_system(rng));
    graphs.push_back(build_radius_graph(systems.back(), cfg));
  }
  const Batch b = make_batch(systems, graphs);

  std::vector<std::pair<int, int>> expected;
  int base = 0;
  for (std::size_t g = 0; g < systems.size(); ++g) {
    for (int e = 0; e < graphs[g].num_edges(); ++e)
      expected.push_back({graphs[g].src(e) + base, graphs[g].dst(e) + base});
    base += systems[g].size();
  }
  REQUIRE(b.num_edges() == static_cast<int>(expected.size()));
  for (int e = 0; e < b.num_edges(); ++e) {
    CHECK(b.src(e) == expected[e].first);
    CHECK(b.dst(e) == expected[e].second);
  }

  // explicit instance: an edge (0,1) stored in the second graph lands at (n0, n0+1)
  if (graphs[1].num_edges() > 0) {
    const int n0 = systems[0].size();
    CHECK(b.src(b.edge_base[1]) == graphs[1].src(0) + n0);
    CHECK(b.dst(b.edge_base[1]) == graphs[1].dst(0) + n0);
  }
}

TEST_CASE("batching then unbatching reproduces systems and graphs exactly") {
  Rng rng(23);
  std::vector<AtomicSystem> systems;
  std::vector<Graph> graphs;
  const GraphBuildConfig cfg{.cutoff = 5.0, .enforce_pbc = true};
  for (int k = 0; k < 5; ++k) {
    AtomicSystem s = testing::random_system(rng);
    s.energy = rng.normal();
    s.forces = Positions::Random(s.size(), 3);
    systems.push_back(s);
    graphs.push_back(build_radius_graph(systems.back(), cfg));
  }
  const Batch b = make_batch(systems, graphs);
  const auto round = unbatch(b);
  REQUIRE(round.size() == systems.size());
  for (std::size_t k = 0; k < systems.size(); ++k) {
    CHECK(round[k].first.positions == systems[k].positions);
    CHECK(round[k].first.atomic_numbers == systems[k].atomic_numbers);
    CHECK(round[k].first.tags == systems[k].tags);
    CHECK(round[k].first.cell == systems[k].cell);
    CHECK(*round[k].first.energy == *systems[k].energy);
    CHECK(*round[k].first.forces == *systems[k].forces);
    CHECK(round[k].second.src == graphs[k].src);
    CHECK(round[k].second.dst == graphs[k].dst);
    CHECK(round[k].second.offsets == graphs[k].offsets);
    CHECK(round[k].second.distances == graphs[k].distances);
  }
}

TEST_CASE("make_batch rejects mismatched inputs") {
  AtomicSystem s = two_atom_system();
  const Graph g = build_radius_graph(s, {.cutoff = 6.0, .enforce_pbc = false});
  CHECK_THROWS(make_batch({s, s}, {g}));
  Graph bad = g;
  bad.num_nodes = 5;
  CHECK_THROWS(make_batch({s}, {bad}));
  CHECK_THROWS(make_batch({}, {}));
}

TEST_CASE("element symbol round trip") {
  CHECK(element_symbol(1) == "H");
  CHECK(element_symbol(78) == "Pt");
  CHECK(element_number("Cu") == 29);
  CHECK(element_number("Xx") == 0);
  CHECK(element_symbol(119) == "X119");
}
