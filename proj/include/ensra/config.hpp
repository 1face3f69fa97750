#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ensra {

/// 802.11 slot durations and energies. Times in microseconds, energies in
/// microjoules, so energy/time comes out in watts and bits/time in Mbps.
struct MacParams {
  double payload_bits = 800.0;        // G
  double backoff_slot_us = 28.0;      // Tb
  double success_slot_us = 100.0;     // Ts
  double collision_slot_us = 100.0;   // Tc
  double backoff_energy_uj = 22.4;    // Eb
  double success_energy_uj = 180.0;   // Es
  // Collision energy E_c(rho, j) = c[0]*rho + c[1]*j + c[2].
  std::array<double, 3> collision_energy_coeffs{80.0, 100.0, 80.0};

  double collision_energy_uj(int rho, int colliders) const {
    return collision_energy_coeffs[0] * rho + collision_energy_coeffs[1] * colliders +
           collision_energy_coeffs[2];
  }
};

/// Binary exponential backoff parameters of the DCF.
struct DcfParams {
  int cw_min = 32;
  int backoff_stages = 5;
};

/// Numerical knobs of the solvers and schedulers.
struct SolverParams {
  double golden_rel_tol = 1e-8;
  double tie_rel_tol = 1e-9;
  double budget_rel_tol = 1e-6;
  std::size_t extreme_point_cap = 4096;
  std::size_t selection_cap = 20000;
  double gp_epsilon_rel = 1e-6;
  int gp_max_iterations = 50;
  int mc_samples = 50;
};

enum class Algorithm { kEnsra, kREnsra, kGpEnsra, kPEnsraExact, kHeuristic };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
bool is_predictive(Algorithm a);

/// Every scenario constant. Rates in Mbps, power in W, bandwidth in MHz,
/// queues in Mb, time in seconds unless a field name says otherwise.
struct SystemConfig {
  int num_users = 4;         // L
  int num_wifi = 3;          // N
  int num_locations = 25;    // S, arranged as a square grid
  int num_subchannels = 4;   // M
  int frame_len = 100;       // T, slots per frame
  int window = 1;            // W, frames per prediction window
  double slot_dt = 0.01;

  double V = 0.5;            // Mb^2/(W s)
  double theta = 0.0;        // Mbps

  double p_max_cell = 20.0;
  double bandwidth_mhz = 2.5;
  double noise_psd = 1e-7;   // W/MHz
  double kappa = 4.7;

  MacParams mac;
  DcfParams dcf;

  double mean_arrival = 2.0;
  int num_frames = 500;
  std::uint64_t seed = 1;
  double prediction_error = 0.0;

  double cell_size_m = 15.0;
  double min_distance_m = 10.0;
  double mobility_stay = 0.5;
  double arrival_stay = 0.6;
  double warmup_fraction = 0.1;

  // Explicit AP coverage, one cell list per AP; empty means a random layout
  // drawn from the seed.
  std::vector<std::vector<int>> wifi_cells;

  SolverParams solver;

  /// Peak arrival rate; the arrival chain takes values {0, mean, 2 mean}.
  double a_max() const { return 2.0 * mean_arrival; }
  int grid_side() const;
  double subchannel_bw() const { return bandwidth_mhz / num_subchannels; }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

}  // namespace ensra
