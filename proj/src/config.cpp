#include "ensra/config.hpp"

#include <cmath>

#include "ensra/error.hpp"

namespace ensra {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kEnsra: return "ensra";
    case Algorithm::kREnsra: return "r_ensra";
    case Algorithm::kGpEnsra: return "gp_ensra";
    case Algorithm::kPEnsraExact: return "p_ensra_exact";
    case Algorithm::kHeuristic: return "heuristic";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::kEnsra, Algorithm::kREnsra, Algorithm::kGpEnsra,
                 Algorithm::kPEnsraExact, Algorithm::kHeuristic}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected ensra, r_ensra, gp_ensra, p_ensra_exact or heuristic)");
}

bool is_predictive(Algorithm a) {
  return a == Algorithm::kGpEnsra || a == Algorithm::kPEnsraExact;
}

int SystemConfig::grid_side() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_locations))));
}

namespace {

void require(bool ok, const char* key, const char* constraint) {
  if (!ok) throw ConfigError(std::string(key) + " " + constraint);
}

}  // namespace

void SystemConfig::validate() const {
  require(num_users >= 1, "num_users", "must be at least 1");
  require(num_users <= 30, "num_users", "must be at most 30");
  require(num_wifi >= 0, "num_wifi", "must be non-negative");
  require(num_locations >= 1, "num_locations", "must be at least 1");
  require(grid_side() * grid_side() == num_locations, "num_locations",
          "must be a perfect square (locations form a square grid)");
  require(num_subchannels >= 1, "num_subchannels", "must be at least 1");
  require(frame_len >= 1, "frame_len", "must be at least 1");
  require(window >= 1, "window", "must be at least 1");
  require(slot_dt > 0, "slot_dt", "must be positive");
  require(V >= 0 && std::isfinite(V), "V", "must be non-negative");
  require(theta >= 0 && std::isfinite(theta), "theta", "must be non-negative");
  require(p_max_cell > 0, "p_max_cell", "must be positive");
  require(bandwidth_mhz > 0, "bandwidth", "must be positive");
  require(noise_psd > 0, "noise_psd", "must be positive");
  require(kappa > 0, "kappa", "must be positive");
  require(mac.payload_bits > 0, "mac.G", "must be positive");
  require(mac.backoff_slot_us > 0, "mac.Tb", "must be positive");
  require(mac.success_slot_us > 0, "mac.Ts", "must be positive");
  require(mac.collision_slot_us > 0, "mac.Tc", "must be positive");
  require(mac.backoff_energy_uj > 0, "mac.Eb", "must be positive");
  require(mac.success_energy_uj > 0, "mac.Es", "must be positive");
  for (double c : mac.collision_energy_coeffs) {
    require(c > 0, "mac.Ec_coeffs", "must all be positive");
  }
  require(dcf.cw_min >= 1, "dcf.cw_min", "must be at least 1");
  require(dcf.backoff_stages >= 0, "dcf.backoff_stages", "must be non-negative");
  require(mean_arrival > 0, "mean_arrival", "must be positive");
  require(num_frames >= 1, "num_frames", "must be at least 1");
  require(prediction_error >= 0 && prediction_error <= 1, "prediction_error",
          "must lie in [0, 1]");
  require(cell_size_m > 0, "cell_size", "must be positive");
  require(min_distance_m > 0, "min_distance", "must be positive");
  require(mobility_stay >= 0 && mobility_stay <= 1, "mobility_stay", "must lie in [0, 1]");
  require(arrival_stay >= 0 && arrival_stay <= 1, "arrival_stay", "must lie in [0, 1]");
  require(warmup_fraction >= 0 && warmup_fraction < 1, "warmup_fraction", "must lie in [0, 1)");
  require(wifi_cells.empty() || static_cast<int>(wifi_cells.size()) == num_wifi, "wifi_cells",
          "must list one cell set per Wi-Fi network");
  for (const auto& cells : wifi_cells) {
    require(!cells.empty(), "wifi_cells", "entries must be non-empty");
    for (int c : cells) require(c >= 0 && c < num_locations, "wifi_cells", "must name valid locations");
  }
  require(solver.golden_rel_tol > 0, "solver.golden_rel_tol", "must be positive");
  require(solver.tie_rel_tol >= 0, "solver.tie_rel_tol", "must be non-negative");
  require(solver.budget_rel_tol >= 0, "solver.budget_rel_tol", "must be non-negative");
  require(solver.extreme_point_cap >= 1, "solver.extreme_point_cap", "must be at least 1");
  require(solver.selection_cap >= 1, "solver.selection_cap", "must be at least 1");
  require(solver.gp_epsilon_rel > 0, "solver.gp_epsilon_rel", "must be positive");
  require(solver.gp_max_iterations >= 1, "solver.gp_max_iterations", "must be at least 1");
  require(solver.mc_samples >= 1, "solver.mc_samples", "must be at least 1");
}

}  // namespace ensra
