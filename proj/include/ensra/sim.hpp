#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/env.hpp"
#include "ensra/model.hpp"
#include "ensra/schedulers.hpp"

namespace ensra {

struct FrameRecord {
  int frame = 0;
  double avg_power = 0.0;          // W over the frame's slots
  std::vector<double> queue;       // Mb per user at frame start
  std::vector<int> alpha;
};

struct RunMetrics {
  // Averages over the slots after warm-up.
  double avg_power = 0.0;          // W
  double avg_queue_slot = 0.0;     // Mb per user, every slot
  double avg_queue_frame = 0.0;    // Mb per user, frame starts only
  double avg_delay = 0.0;          // s, avg_queue_slot / mean arrival
  double offload_fraction = 0.0;   // Wi-Fi share of served Mb
  int frames = 0;
  int warmup_frames = 0;

  // Whole-run bookkeeping, per user.
  std::vector<double> arrived_mb;
  std::vector<double> served_mb;
  std::vector<double> final_queue_mb;

  double max_cell_power = 0.0;     // largest sum p in any slot, W
  double max_total_power = 0.0;    // largest macrocell + Wi-Fi power, W
  double r_max_realized = 0.0;     // largest per-user rate in any slot, Mbps
  long long slots_validated = 0;

  // Predictive runs only.
  long long forecast_items = 0;
  long long forecast_corrupted = 0;
  int infeasible_fallbacks = 0;    // planned selections invalid at the true location
  double avg_gp_iterations = 0.0;
  int approximate_steps = 0;

  std::vector<FrameRecord> series;  // filled when requested
};

struct RunOptions {
  bool validate = true;            // check every slot's decision
  bool record_series = false;
  KernelMode mode = KernelMode::kParallel;
};

/// Simulates cfg.num_frames frames on a topology drawn from cfg.seed.
RunMetrics run(const SystemConfig& cfg, Algorithm algorithm, const RunOptions& opts = {});

/// Same on a given scenario and precomputed trace.
RunMetrics run(const Scenario& sc, const EnvTrace& trace, Algorithm algorithm,
               const RunOptions& opts = {});

struct BoundReport {
  double b2 = 0.0;
  double p_max = 0.0;
  double avg_power = 0.0;
  double avg_queue_frame_total = 0.0;   // L * per-user frame-start average, Mb
  double avg_queue_slot_total = 0.0;    // L * per-user slot average, Mb
  double power_gap = 0.0;               // b2 / V
  double queue_correction = 0.0;        // (T-1)/2 L A_max dt
  bool queue_relation_holds = false;    // slot - frame <= correction
};

BoundReport bound_report(const RunMetrics& m, const SystemConfig& cfg, double V);

enum class SweepAxis { kV, kTheta, kWindow, kMeanArrival, kErrorRate };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis axis);
void apply_axis(SystemConfig& cfg, SweepAxis axis, double value);

struct RunRow {
  int run_id = 0;
  std::string algorithm;
  double V = 0.0;
  double theta = 0.0;
  int W = 1;
  double error_rate = 0.0;
  double mean_arrival = 0.0;
  std::uint64_t seed = 0;
  double avg_power = 0.0;
  double avg_queue = 0.0;
  double avg_delay = 0.0;
  double offload_pct = 0.0;
  int frames = 0;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

RunRow make_row(int run_id, const SystemConfig& cfg, Algorithm algorithm, const RunMetrics& m);

/// One run per (value, replication); replication r uses seed cfg.seed + r.
/// Runs execute in parallel; rows come back in (value, replication) order.
std::vector<RunRow> sweep(const SystemConfig& base, Algorithm algorithm, SweepAxis axis,
                          const std::vector<double>& values, int replications,
                          const RunOptions& opts = {});

}  // namespace ensra
