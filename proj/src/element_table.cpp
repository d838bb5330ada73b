#include "phast/element_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phast {

const std::array<const char*, kNumProperties + 2> kElementTableColumns = {
    "atomic_radius_pm",
    "atomic_volume_cm3_mol",
    "atomic_density_g_cm3",
    "dipole_polarizability_au",
    "electron_affinity_ev",
    "electronegativity_allen",
    "vdw_radius_pm",
    "metallic_radius_pm",
    "covalent_radius_pm",
    "ionization_energy_1_ev",
    "ionization_energy_2_ev",
    "period",
    "group",
};

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

ElementTable ElementTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("element table: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("element table: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() != kElementTableColumns.size())
    throw std::runtime_error("element table: expected " +
                             std::to_string(kElementTableColumns.size()) + " columns, got " +
                             std::to_string(header.size()));
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != kElementTableColumns[c])
      throw std::runtime_error("element table: unexpected column '" + header[c] + "' (want '" +
                               kElementTableColumns[c] + "')");
  }

  ElementTable table;
  table.rows_.resize(kMaxZ + 1);
  int z = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++z;
    if (z > kMaxZ) throw std::runtime_error("element table: more than " + std::to_string(kMaxZ) + " rows");
    const auto fields = split_csv_line(line);
    if (fields.size() != kElementTableColumns.size())
      throw std::runtime_error("element table: row " + std::to_string(z) + " has " +
                               std::to_string(fields.size()) + " fields");
    Row& row = table.rows_[z];
    for (int c = 0; c < kNumProperties; ++c) {
      const std::string& f = fields[c];
      if (f.empty()) continue;
      double v = 0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw std::runtime_error("element table: bad number '" + f + "' at row " + std::to_string(z));
      row.values[c] = v;
      row.present[c] = true;
    }
    row.period = fields[kNumProperties].empty() ? 0 : std::stoi(fields[kNumProperties]);
    row.group = fields[kNumProperties + 1].empty() ? 0 : std::stoi(fields[kNumProperties + 1]);
  }
  if (z != kMaxZ)
    throw std::runtime_error("element table: expected " + std::to_string(kMaxZ) + " rows, got " +
                             std::to_string(z));
  return table;
}

void ElementTable::check_z(int z) const {
  if (z < 1 || z > kMaxZ)
    throw std::out_of_range("element table: atomic number " + std::to_string(z) + " out of [1,100]");
}

bool ElementTable::has(int z, Property p) const {
  check_z(z);
  return rows_[z].present[static_cast<int>(p)];
}

double ElementTable::get(int z, Property p) const {
  check_z(z);
  const Row& r = rows_[z];
  if (!r.present[static_cast<int>(p)])
    throw std::runtime_error("element table: property " +
                             std::string(kElementTableColumns[static_cast<int>(p)]) +
                             " missing for Z=" + std::to_string(z));
  return r.values[static_cast<int>(p)];
}

std::optional<double> ElementTable::maybe(int z, Property p) const {
  check_z(z);
  const Row& r = rows_[z];
  if (!r.present[static_cast<int>(p)]) return std::nullopt;
  return r.values[static_cast<int>(p)];
}

int ElementTable::period(int z) const {
  check_z(z);
  return rows_[z].period;
}

int ElementTable::group(int z) const {
  check_z(z);
  return rows_[z].group;
}

}  // namespace phast
