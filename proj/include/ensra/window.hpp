#pragma once

#include <span>
#include <vector>

#include "ensra/env.hpp"
#include "ensra/schedulers.hpp"

namespace ensra {

/// Plan for every frame of a prediction window.
struct WindowDecision {
  std::vector<FrameDecision> frames;
  double F = 0.0;
  int iterations = 0;
  std::vector<double> F_history;  // F before the first sweep, then after each sweep
  int approximate_steps = 0;      // block steps taken outside the heavy-traffic regime
  int rejected_steps = 0;         // block steps that would have raised F
  bool heavy_traffic = false;
};

/// Frame-start backlogs of every window frame under `frames`, propagated
/// slot by slot with q' = max(q - r dt, 0) + A dt on the forecast arrivals.
std::vector<std::vector<double>> window_queues(std::span<const double> q0,
                                               const EnvTrace& forecast,
                                               std::span<const FrameDecision> frames,
                                               const SystemConfig& cfg);

/// V sum P + sum_l sum_w Q_l(w) sum_tau (A_l + theta - r_l) over the window.
double window_objective(std::span<const double> q0, const EnvTrace& forecast,
                        std::span<const FrameDecision> frames, double V, double theta,
                        const SystemConfig& cfg);

/// Per-user weights of the frame-w block step:
/// Q_l(w) - dt C_R,l + dt C_A,l with C_R the planned service and C_A the
/// arrival-plus-theta mass of frames after w.
std::vector<double> block_weights(std::span<const double> q0, const EnvTrace& forecast,
                                  std::span<const FrameDecision> frames, int w, double theta,
                                  const SystemConfig& cfg);

/// True when every initial backlog is at least W T r_max dt, so no queue can
/// empty inside the window.
bool heavy_traffic(std::span<const double> q0, const EnvTrace& forecast, const Scenario& sc);

/// Block-coordinate descent over the window's frames, starting from "all
/// macrocell, no power".
WindowDecision gp_ensra_window(std::span<const double> q0, const EnvTrace& forecast, double V,
                               double theta, const Scenario& sc,
                               KernelMode mode = KernelMode::kParallel);

/// Exhaustive search over every sequence of per-frame selections; for each
/// sequence the allocations are refined by block descent started from zero
/// power and from the myopic per-frame plan. Global over selections only:
/// the allocation refinement is local. Tiny instances only (throws
/// ScaleError beyond cfg.solver.selection_cap).
WindowDecision p_ensra_exact(std::span<const double> q0, const EnvTrace& forecast, double V,
                             double theta, const Scenario& sc,
                             KernelMode mode = KernelMode::kSerial);

}  // namespace ensra
