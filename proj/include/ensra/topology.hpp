#pragma once

#include <cstdint>
#include <vector>

#include "ensra/config.hpp"

namespace ensra {

/// Static geometry: which Wi-Fi APs cover each grid cell and how far each cell
/// is from the macrocell base station. Wi-Fi ids are 1-based; 0 is reserved
/// for the macrocell.
struct Topology {
  int side = 0;
  std::vector<std::vector<int>> wifi_coverage;  // per location, sorted AP ids
  std::vector<double> distance_m;               // per location, clamped at d_min
  std::vector<std::vector<int>> ap_cells;       // per AP (index n-1), covered cells

  int num_locations() const { return static_cast<int>(distance_m.size()); }
  bool covers(int location, int ap) const;
};

/// Distance from the centre of `location` to the grid centre, clamped below at
/// cfg.min_distance_m.
double cell_distance(int location, const SystemConfig& cfg);

/// Random AP placement: each AP anchors at a uniform cell and grows a connected
/// patch of 1 to 4 cells.
Topology make_topology(const SystemConfig& cfg, std::uint64_t seed);

/// Build a topology from explicit per-AP cell lists.
Topology make_topology(const SystemConfig& cfg, const std::vector<std::vector<int>>& ap_cells);

}  // namespace ensra
