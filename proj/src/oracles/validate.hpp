#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/sim.hpp"

namespace ensra::check {

// Each comparison draws its instances from `seed` and takes the physical
// constants and solver settings from `cfg`. Instance sizes are fixed small.

struct BianchiStats {
  double phi1_error = 0.0;        // |phi(1) - 2/(cw+1)|
  double worst_residual = 0.0;    // rho = 1..max_rho
  double worst_phi_gap = 0.0;     // vs the damped fixed point
  double worst_rate_rel = 0.0;    // vs the direct formulas at the same phi
  double worst_power_rel = 0.0;
};
BianchiStats compare_bianchi(const SystemConfig& cfg, int max_rho);

struct Stage2Stats {
  int instances = 0;
  int failures = 0;               // shortfall above tolerance or excess above 1e-9
  double worst_shortfall = 0.0;   // (grid optimum - solver) / |grid optimum|
  double worst_excess = 0.0;      // (solver - continuous optimum) / |continuous optimum|
  double worst_gap = 0.0;         // (continuous optimum - solver) / |continuous optimum|
};
/// Random slots with 1..2 users and 1..2 channels.
Stage2Stats compare_stage2(const SystemConfig& cfg, int instances, std::uint64_t seed,
                           double rel_tol);

struct DualityStats {
  int instances = 0;
  int failures = 0;
  double worst_dual_rel = 0.0;    // (D(lambda*) - min D) / |min D|
  double worst_mu_rel = 0.0;      // mu_lm vs scalar maximization
  double worst_weak = 0.0;        // (solver objective - D(lambda*)) / |D|, must stay <= 0
};
DualityStats compare_duality(const SystemConfig& cfg, int instances, std::uint64_t seed,
                             double rel_tol);

struct EnsraStats {
  int instances = 0;
  int failures = 0;
  double worst_shortfall = 0.0;   // (ensra - brute force) / |brute force|, objective minimized
};
/// Frames with L = 2, N = 1, M = 2, T = 2.
EnsraStats compare_ensra(const SystemConfig& cfg, int instances, std::uint64_t seed, double rel_tol);

struct GpStats {
  int windows = 0;
  int monotone_violations = 0;
  int max_iterations = 0;
  int hit_cap = 0;                // windows that stopped on the iteration cap
  double mean_iterations = 0.0;
};
/// L = 3, N = 2, M = 3, T = 10, W = 3 windows with random backlogs.
GpStats check_gp_monotone(const SystemConfig& cfg, int windows, std::uint64_t seed);

struct HeavyStats {
  int instances = 0;
  int not_heavy = 0;              // constructed instance failed the condition
  int step_mismatches = 0;        // block step differs from the reweighted ENSRA solve
  double worst_reduction = 0.0;   // spread of F - reweighted objective over candidates
};
HeavyStats check_gp_heavy(const SystemConfig& cfg, int instances, std::uint64_t seed);

struct SingleFrameStats {
  bool identical = false;
  std::string detail;
};
/// GP-ENSRA with W = 1, theta = 0 and exact forecasts against ENSRA.
SingleFrameStats check_gp_single_frame(const SystemConfig& cfg);

struct ExactStats {
  int windows = 0;
  int violations = 0;             // exact F above greedy F
  double worst_excess = 0.0;      // (exact - greedy) / |greedy|
  double median_gap = 0.0;        // (greedy - exact) / |exact|
  double max_gap = 0.0;
};
/// L = 2, N = 1, M = 2, T = 5, W = 2 windows.
ExactStats compare_exact_greedy(const SystemConfig& cfg, int windows, std::uint64_t seed);

struct FeasibilityStats {
  int runs = 0;
  int failures = 0;
  double worst_conservation = 0.0;  // |arrived - served - final| / arrived
  double max_cell_power = 0.0;
  std::string detail;               // first failure
};
/// Simulates every algorithm on `cfg`, validating every slot.
FeasibilityStats check_feasibility(const SystemConfig& cfg, const std::vector<Algorithm>& algs);

/// Conservation error of one run's bookkeeping.
double conservation_error(const RunMetrics& m);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite on `cfg`. Throws ConfigError for unknown names.
SuiteResult run_suite(const std::string& name, const SystemConfig& cfg);

}  // namespace ensra::check
