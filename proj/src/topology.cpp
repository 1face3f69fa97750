#include "ensra/topology.hpp"

#include <algorithm>
#include <cmath>

#include "ensra/error.hpp"
#include "ensra/rng.hpp"

namespace ensra {

bool Topology::covers(int location, int ap) const {
  const auto& aps = wifi_coverage.at(static_cast<std::size_t>(location));
  return std::binary_search(aps.begin(), aps.end(), ap);
}

double cell_distance(int location, const SystemConfig& cfg) {
  const int side = cfg.grid_side();
  const int row = location / side;
  const int col = location % side;
  const double centre = 0.5 * side;
  const double dx = (col + 0.5 - centre) * cfg.cell_size_m;
  const double dy = (row + 0.5 - centre) * cfg.cell_size_m;
  return std::max(std::hypot(dx, dy), cfg.min_distance_m);
}

Topology make_topology(const SystemConfig& cfg, const std::vector<std::vector<int>>& ap_cells) {
  if (static_cast<int>(ap_cells.size()) != cfg.num_wifi) {
    throw ShapeError("expected one cell list per Wi-Fi network");
  }
  Topology topo;
  topo.side = cfg.grid_side();
  topo.wifi_coverage.assign(static_cast<std::size_t>(cfg.num_locations), {});
  topo.distance_m.resize(static_cast<std::size_t>(cfg.num_locations));
  for (int s = 0; s < cfg.num_locations; ++s) topo.distance_m[s] = cell_distance(s, cfg);
  topo.ap_cells = ap_cells;
  for (int n = 0; n < cfg.num_wifi; ++n) {
    for (int cell : ap_cells[n]) {
      if (cell < 0 || cell >= cfg.num_locations) throw DomainError("AP cell out of range");
      auto& cov = topo.wifi_coverage[cell];
      if (std::find(cov.begin(), cov.end(), n + 1) == cov.end()) cov.push_back(n + 1);
    }
  }
  for (auto& cov : topo.wifi_coverage) std::sort(cov.begin(), cov.end());
  return topo;
}

Topology make_topology(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kTopology);
  const int side = cfg.grid_side();
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(cfg.num_wifi));
  for (auto& patch : cells) {
    const int target = 1 + uniform_int(rng, 4);
    patch.push_back(uniform_int(rng, cfg.num_locations));
    // Grow by attaching a random 4-neighbour of a random cell already in the
    // patch; stops early if the patch cannot grow (tiny grids).
    for (int attempts = 0; static_cast<int>(patch.size()) < target && attempts < 64; ++attempts) {
      const int base = patch[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(patch.size())))];
      const int r = base / side;
      const int c = base % side;
      static constexpr int kDr[4] = {-1, 1, 0, 0};
      static constexpr int kDc[4] = {0, 0, -1, 1};
      const int dir = uniform_int(rng, 4);
      const int nr = r + kDr[dir];
      const int nc = c + kDc[dir];
      if (nr < 0 || nr >= side || nc < 0 || nc >= side) continue;
      const int cell = nr * side + nc;
      if (std::find(patch.begin(), patch.end(), cell) == patch.end()) patch.push_back(cell);
    }
    std::sort(patch.begin(), patch.end());
  }
  return make_topology(cfg, cells);
}

}  // namespace ensra
