#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace phast {

// The 11 per-element physical properties, in file column order.
enum class Property {
  atomic_radius = 0,
  atomic_volume,
  atomic_density,
  dipole_polarizability,
  electron_affinity,
  electronegativity_allen,
  vdw_radius,
  metallic_radius,
  covalent_radius,
  ionization_energy_1,
  ionization_energy_2,
};
inline constexpr int kNumProperties = 11;

extern const std::array<const char*, kNumProperties + 2> kElementTableColumns;

// Per-element physical properties for Z in [1, 100]. Values come from a CSV
// shipped with the repo (row i = atomic number i); empty cells are missing and
// stay flagged rather than silently zeroed.
class ElementTable {
 public:
  static constexpr int kMaxZ = 100;

  // Parses the CSV data file. Throws std::runtime_error on malformed input.
  static ElementTable load_csv(const std::string& path);

  bool has(int z, Property p) const;
  // Throws if the value is missing.
  double get(int z, Property p) const;
  std::optional<double> maybe(int z, Property p) const;

  // 0 means missing (lanthanides/actinides have no standard group).
  int period(int z) const;
  int group(int z) const;

  int max_z() const { return kMaxZ; }

 private:
  struct Row {
    std::array<double, kNumProperties> values{};
    std::array<bool, kNumProperties> present{};
    int period = 0;
    int group = 0;
  };
  std::vector<Row> rows_;  // index 0 unused; 1..kMaxZ
  void check_z(int z) const;
};

}  // namespace phast
