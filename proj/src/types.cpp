#include "phast/types.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace phast {

namespace {

const char* const kSymbols[] = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

bool cell_invertible(const Cell& cell) {
  // Scale-aware tolerance: a cell with ~Angstrom rows has |det| well above this.
  const double scale = cell.cwiseAbs().maxCoeff();
  return std::abs(cell.determinant()) > 1e-10 * std::max(1.0, scale * scale * scale);
}

}  // namespace

ValidationReport validate_system(const AtomicSystem& s) {
  ValidationReport report;
  auto fail = [&](std::string msg, int idx = -1) { report.violations.push_back({std::move(msg), idx}); };

  const int n = s.size();
  if (n < 1) fail("system has no atoms");
  if (s.positions.rows() != n) fail("positions row count != atomic_numbers length");
  if (s.tags.size() != n) fail("tags length != atomic_numbers length");

  for (int i = 0; i < n; ++i) {
    const int z = s.atomic_numbers(i);
    if (z < 1) fail("atomic_number < 1 at index " + std::to_string(i), i);
  }
  for (int i = 0; i < static_cast<int>(s.tags.size()) && i < n; ++i) {
    const int t = s.tags(i);
    if (t < 0 || t > 2) fail("tag out of {0,1,2} at index " + std::to_string(i), i);
  }

  const bool any_pbc = s.pbc[0] || s.pbc[1] || s.pbc[2];
  if (any_pbc && !cell_invertible(s.cell)) fail("cell not invertible");

  if (s.forces && s.forces->rows() != n) fail("force_labels row count != N");

  for (const auto& [idx, card] : s.supernode_cardinality) {
    if (idx < 0 || idx >= n) {
      fail("supernode_cardinality key out of range: " + std::to_string(idx), idx);
      continue;
    }
    if (card < 1) fail("supernode cardinality < 1 at index " + std::to_string(idx), idx);
    const bool synthetic = s.atomic_numbers(idx) >= kSupernodeCode;
    const bool tag_type = idx < s.tags.size() && s.tags(idx) == 0;
    if (!synthetic && !tag_type)
      fail("supernode_cardinality key refers to a regular atom at index " + std::to_string(idx), idx);
  }
  return report;
}

ValidationReport validate_graph(const Graph& g, const AtomicSystem& s, double distance_tol) {
  ValidationReport report;
  auto fail = [&](std::string msg, int idx = -1) { report.violations.push_back({std::move(msg), idx}); };

  if (g.num_nodes != s.size()) fail("graph num_nodes != system size");
  const int e = g.num_edges();
  if (g.dst.size() != e || g.offsets.rows() != e || g.distances.size() != e)
    fail("edge array lengths disagree");

  for (int k = 0; k < e; ++k) {
    const int a = g.src(k), b = g.dst(k);
    if (a < 0 || a >= g.num_nodes || b < 0 || b >= g.num_nodes) {
      fail("edge endpoint out of range", k);
      continue;
    }
    const Eigen::RowVector3i o = g.offsets.row(k);
    if (a == b && o.isZero()) fail("self edge with zero offset", k);
    const Eigen::RowVector3d shift = o.cast<double>() * s.cell;
    const double d = (s.positions.row(b) + shift - s.positions.row(a)).norm();
    if (std::abs(d - g.distances(k)) > distance_tol)
      fail("cached distance inconsistent with positions", k);
    const bool supernode_edge = s.is_supernode(a) || s.is_supernode(b);
    if (!supernode_edge && g.distances(k) > g.cutoff + distance_tol)
      fail("edge distance exceeds cutoff", k);
  }
  return report;
}

Batch make_batch(const std::vector<AtomicSystem>& systems, const std::vector<Graph>& graphs) {
  if (systems.empty()) throw std::invalid_argument("make_batch: empty system list");
  if (systems.size() != graphs.size())
    throw std::invalid_argument("make_batch: systems and graphs length mismatch");

  int total_nodes = 0, total_edges = 0;
  for (std::size_t g = 0; g < systems.size(); ++g) {
    if (graphs[g].num_nodes != systems[g].size())
      throw std::invalid_argument("make_batch: graph " + std::to_string(g) +
                                  " inconsistent with its system");
    total_nodes += systems[g].size();
    total_edges += graphs[g].num_edges();
  }

  Batch b;
  b.systems = systems;
  b.graphs = graphs;
  b.node_graph_index.resize(total_nodes);
  b.positions.resize(total_nodes, 3);
  b.atomic_numbers.resize(total_nodes);
  b.tags.resize(total_nodes);
  b.src.resize(total_edges);
  b.dst.resize(total_edges);
  b.distances.resize(total_edges);
  b.offset_disp.resize(total_edges, 3);

  int node_base = 0, edge_base = 0;
  for (std::size_t g = 0; g < systems.size(); ++g) {
    const AtomicSystem& s = systems[g];
    const Graph& gr = graphs[g];
    const int n = s.size();
    b.node_base.push_back(node_base);
    b.edge_base.push_back(edge_base);
    for (int i = 0; i < n; ++i) b.node_graph_index(node_base + i) = static_cast<int>(g);
    b.positions.middleRows(node_base, n) = s.positions;
    b.atomic_numbers.segment(node_base, n) = s.atomic_numbers;
    b.tags.segment(node_base, n) = s.tags;
    for (const auto& [idx, card] : s.supernode_cardinality)
      b.supernode_cardinality[node_base + idx] = card;
    for (const auto& [idx, comp] : s.supernode_composition)
      b.supernode_composition[node_base + idx] = comp;
    const int e = gr.num_edges();
    for (int k = 0; k < e; ++k) {
      b.src(edge_base + k) = gr.src(k) + node_base;
      b.dst(edge_base + k) = gr.dst(k) + node_base;
      b.offset_disp.row(edge_base + k) = gr.offsets.row(k).cast<double>() * s.cell;
    }
    b.distances.segment(edge_base, e) = gr.distances;
    node_base += n;
    edge_base += e;
  }
  return b;
}

std::vector<std::pair<AtomicSystem, Graph>> unbatch(const Batch& batch) {
  std::vector<std::pair<AtomicSystem, Graph>> out;
  out.reserve(batch.systems.size());
  for (std::size_t g = 0; g < batch.systems.size(); ++g)
    out.emplace_back(batch.systems[g], batch.graphs[g]);
  return out;
}

std::string element_symbol(int z) {
  if (z >= 1 && z <= 118) return kSymbols[z - 1];
  return "X" + std::to_string(z);
}

int element_number(const std::string& symbol) {
  static const std::unordered_map<std::string, int> table = [] {
    std::unordered_map<std::string, int> m;
    for (int i = 0; i < 118; ++i) m[kSymbols[i]] = i + 1;
    return m;
  }();
  auto it = table.find(symbol);
  return it == table.end() ? 0 : it->second;
}

}  // namespace phast
