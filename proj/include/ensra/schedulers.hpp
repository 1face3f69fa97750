#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/env.hpp"
#include "ensra/frame_kernels.hpp"
#include "ensra/model.hpp"
#include "ensra/rng.hpp"
#include "ensra/topology.hpp"
#include "ensra/wifi.hpp"

namespace ensra {

/// Everything static about one simulated system.
struct Scenario {
  SystemConfig cfg;
  Topology topo;
  WifiModel wifi;

  /// Random AP layout from cfg.seed.
  static Scenario make(const SystemConfig& cfg);
  static Scenario make(const SystemConfig& cfg, const Topology& topo);
};

/// Network selection for one frame plus the per-slot allocations it implies.
/// `rates` and `power` are evaluated on the trace the decision was planned
/// against.
struct FrameDecision {
  std::vector<int> alpha;
  std::vector<SlotAllocation> slots;
  std::vector<double> rates;  // slots x L, Mbps
  std::vector<double> power;  // per slot, W (macrocell + Wi-Fi)
  double objective = 0.0;     // V sum P - sum_l weight_l sum r_l
  std::size_t candidates = 0;

  int num_slots() const { return static_cast<int>(slots.size()); }
  std::span<const double> slot_rates(int slot) const {
    const auto L = alpha.size();
    return {rates.data() + static_cast<std::size_t>(slot) * L, L};
  }
};

/// {0} plus every AP covering the user's location.
std::vector<std::vector<int>> selection_options(std::span<const int> locations,
                                                const Topology& topo);

UserMask cellular_mask(std::span<const int> alpha);

/// Every feasible joint selection of one frame (lexicographic order) with the
/// Stage II table for the masks they use and the frame objective of each.
struct FrameCandidates {
  std::vector<std::vector<int>> alphas;
  std::vector<std::size_t> mask_index;
  std::vector<double> objective;
  Stage2Table table;
  std::vector<double> weights;
  double V = 0.0;
};

/// Throws ScaleError when the number of joint selections exceeds
/// cfg.solver.selection_cap. Weights may be negative.
FrameCandidates enumerate_frame(std::span<const double> weights, const EnvTrace& env, int frame,
                                double V, const Scenario& sc, KernelMode mode);

FrameDecision materialize(const FrameCandidates& cands, std::size_t which, const Scenario& sc);

/// Index of the smallest objective; earlier candidates win exact ties.
std::size_t best_candidate(const FrameCandidates& cands);

/// Frame decision with full knowledge of the frame's channels.
FrameDecision ensra_frame(std::span<const double> q, const EnvTrace& env, int frame, double V,
                          const Scenario& sc, KernelMode mode = KernelMode::kParallel);

/// Same search with arbitrary (possibly negative) per-user weights.
FrameDecision ensra_frame_weighted(std::span<const double> weights, const EnvTrace& env, int frame,
                                   double V, const Scenario& sc,
                                   KernelMode mode = KernelMode::kParallel);

/// Fills an L x M gain matrix for one Monte Carlo channel draw.
using ChannelSampler = std::function<void(Rng&, std::span<double>)>;

/// Rayleigh draws at each user's distance for the given locations.
ChannelSampler rayleigh_sampler(std::span<const int> locations, const Scenario& sc);

/// Selection from a Monte Carlo estimate of the expected frame objective
/// (cfg.solver.mc_samples one-slot draws shared by all candidates); each
/// slot is then allocated from that slot's observed gains only.
FrameDecision r_ensra_frame(std::span<const double> q, const EnvTrace& env, int frame, double V,
                            const Scenario& sc, Rng& rng, const ChannelSampler& sampler,
                            KernelMode mode = KernelMode::kParallel);

/// Load-balancing baseline: users closer than `macro_radius_m` (or without
/// Wi-Fi) stay on the macrocell, the rest join the least-loaded AP in index
/// order; channels go to the best even-power user and the full budget is
/// water-filled.
FrameDecision heuristic_frame(std::span<const double> q, const EnvTrace& env, int frame,
                              const Scenario& sc, double macro_radius_m = 100.0);

/// Frame objective of a decision, re-evaluated from its rates and power.
double frame_objective(const FrameDecision& d, std::span<const double> weights, double V);

/// Fills `rates` and `power` of `d` from its allocations on slots of `env`
/// starting at `first_slot`.
void evaluate_decision(FrameDecision& d, const EnvTrace& env, int first_slot, const Scenario& sc);

}  // namespace ensra
