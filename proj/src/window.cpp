#include "ensra/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ensra/error.hpp"

namespace ensra {

namespace {

struct FrameView {
  std::span<const double> rates;  // T x L
  std::span<const double> power;  // T
};

FrameView view_of(const FrameDecision& d) { return {d.rates, d.power}; }

double objective_of_views(std::span<const double> q0, const EnvTrace& fc,
                          std::span<const FrameView> views, double V, double theta,
                          const SystemConfig& cfg) {
  const int L = fc.num_users;
  const int T = fc.frame_len;
  std::vector<double> q(q0.begin(), q0.end());
  std::vector<double> qw(static_cast<std::size_t>(L));
  double F = 0.0;
  for (std::size_t w = 0; w < views.size(); ++w) {
    qw = q;
    for (int tau = 0; tau < T; ++tau) {
      const int t = static_cast<int>(w) * T + tau;
      const auto a = fc.arrivals(t);
      const double* r = views[w].rates.data() + static_cast<std::size_t>(tau) * L;
      F += V * views[w].power[tau];
      for (int l = 0; l < L; ++l) {
        F += qw[l] * (a[l] + theta - r[l]);
        q[l] = std::max(q[l] - r[l] * cfg.slot_dt, 0.0) + a[l] * cfg.slot_dt;
      }
    }
  }
  return F;
}

FrameDecision idle_frame(const EnvTrace& fc, int w, std::span<const int> alpha, const Scenario& sc) {
  FrameDecision d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.slots.assign(static_cast<std::size_t>(fc.frame_len), SlotAllocation(sc.cfg.num_subchannels));
  evaluate_decision(d, fc, w * fc.frame_len, sc);
  return d;
}

// A single block is solved exactly, so its step is always taken; otherwise a
// step is kept only if F does not rise.
bool accept_step(double f_new, double f_old, int window) {
  return window == 1 || f_new <= f_old;
}

// Re-solve frame w's allocations for a fixed selection using block weights.
FrameDecision block_response(std::span<const double> u, const EnvTrace& fc, int w,
                             std::span<const int> alpha, double V, const Scenario& sc) {
  const Stage2Params prm = Stage2Params::from(sc.cfg, V);
  const UserMask mask = cellular_mask(alpha);
  FrameDecision d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.candidates = 1;
  for (int tau = 0; tau < fc.frame_len; ++tau) {
    d.slots.push_back(solve_slot(mask, u, fc.gains(w * fc.frame_len + tau), sc.cfg, prm).alloc);
  }
  evaluate_decision(d, fc, w * fc.frame_len, sc);
  d.objective = frame_objective(d, u, V);
  return d;
}

}  // namespace

std::vector<std::vector<double>> window_queues(std::span<const double> q0,
                                               const EnvTrace& forecast,
                                               std::span<const FrameDecision> frames,
                                               const SystemConfig& cfg) {
  const int L = forecast.num_users;
  const int T = forecast.frame_len;
  std::vector<std::vector<double>> out;
  std::vector<double> q(q0.begin(), q0.end());
  for (std::size_t w = 0; w < frames.size(); ++w) {
    out.push_back(q);
    for (int tau = 0; tau < T; ++tau) {
      const auto a = forecast.arrivals(static_cast<int>(w) * T + tau);
      const auto r = frames[w].slot_rates(tau);
      for (int l = 0; l < L; ++l) {
        q[l] = std::max(q[l] - r[l] * cfg.slot_dt, 0.0) + a[l] * cfg.slot_dt;
      }
    }
  }
  return out;
}

double window_objective(std::span<const double> q0, const EnvTrace& forecast,
                        std::span<const FrameDecision> frames, double V, double theta,
                        const SystemConfig& cfg) {
  std::vector<FrameView> views;
  for (const auto& f : frames) views.push_back(view_of(f));
  return objective_of_views(q0, forecast, views, V, theta, cfg);
}

std::vector<double> block_weights(std::span<const double> q0, const EnvTrace& forecast,
                                  std::span<const FrameDecision> frames, int w, double theta,
                                  const SystemConfig& cfg) {
  const int L = forecast.num_users;
  const int T = forecast.frame_len;
  auto u = window_queues(q0, forecast, frames.first(static_cast<std::size_t>(w) + 1), cfg)
               .at(static_cast<std::size_t>(w));
  for (std::size_t v = static_cast<std::size_t>(w) + 1; v < frames.size(); ++v) {
    for (int tau = 0; tau < T; ++tau) {
      const auto a = forecast.arrivals(static_cast<int>(v) * T + tau);
      const auto r = frames[v].slot_rates(tau);
      for (int l = 0; l < L; ++l) u[l] += cfg.slot_dt * (a[l] + theta - r[l]);
    }
  }
  return u;
}

bool heavy_traffic(std::span<const double> q0, const EnvTrace& forecast, const Scenario& sc) {
  double h_max = 0.0;
  for (double g : forecast.gain) h_max = std::max(h_max, g);
  const double r_max = rate_upper_bound(h_max, sc.cfg, sc.wifi);
  const double need = forecast.num_slots() * r_max * sc.cfg.slot_dt;
  return std::all_of(q0.begin(), q0.end(), [&](double q) { return q >= need; });
}

WindowDecision gp_ensra_window(std::span<const double> q0, const EnvTrace& forecast, double V,
                               double theta, const Scenario& sc, KernelMode mode) {
  const SystemConfig& cfg = sc.cfg;
  const int W = forecast.num_frames;
  const int L = cfg.num_users;
  if (static_cast<int>(q0.size()) != L) throw ShapeError("one backlog per user expected");

  WindowDecision out;
  out.heavy_traffic = heavy_traffic(q0, forecast, sc);
  const std::vector<int> macro(static_cast<std::size_t>(L), 0);
  for (int w = 0; w < W; ++w) out.frames.push_back(idle_frame(forecast, w, macro, sc));
  double F = window_objective(q0, forecast, out.frames, V, theta, cfg);
  out.F_history.push_back(F);

  double eps = 0.0;
  for (int it = 1; it <= cfg.solver.gp_max_iterations; ++it) {
    for (int w = 0; w < W; ++w) {
      const auto u = block_weights(q0, forecast, out.frames, w, theta, cfg);
      const FrameCandidates c = enumerate_frame(u, forecast, w, V, sc, mode);
      // Outside the heavy-traffic regime the propagated queues are clamped
      // and the reweighted objective only approximates the block's F.
      if (!out.heavy_traffic) ++out.approximate_steps;
      const std::size_t pick = best_candidate(c);
      FrameDecision cand = materialize(c, pick, sc);
      std::swap(out.frames[w], cand);
      const double F_new = window_objective(q0, forecast, out.frames, V, theta, cfg);
      if (accept_step(F_new, F, W)) {
        F = F_new;
      } else {
        std::swap(out.frames[w], cand);
        ++out.rejected_steps;
      }
    }
    out.F_history.push_back(F);
    out.iterations = it;
    if (it == 1) eps = cfg.solver.gp_epsilon_rel * std::abs(F);
    // One block is solved exactly in a single pass.
    if (W == 1) break;
    if (it >= 2 && out.F_history[it - 1] - out.F_history[it] <= eps) break;
  }
  out.F = F;
  return out;
}

WindowDecision p_ensra_exact(std::span<const double> q0, const EnvTrace& forecast, double V,
                             double theta, const Scenario& sc, KernelMode) {
  const SystemConfig& cfg = sc.cfg;
  const int W = forecast.num_frames;
  const int L = cfg.num_users;

  std::vector<std::vector<std::vector<int>>> per_frame(static_cast<std::size_t>(W));
  std::size_t total = 1;
  for (int w = 0; w < W; ++w) {
    const auto opts = selection_options(forecast.locations(w), sc.topo);
    std::vector<std::size_t> idx(static_cast<std::size_t>(L), 0);
    std::size_t n = 1;
    for (const auto& o : opts) n *= o.size();
    if (total > cfg.solver.selection_cap / n) {
      throw ScaleError("window search space exceeds " + std::to_string(cfg.solver.selection_cap) +
                       " selection sequences; exact search is for tiny instances only");
    }
    total *= n;
    std::vector<int> alpha(static_cast<std::size_t>(L));
    for (std::size_t k = 0; k < n; ++k) {
      for (int l = 0; l < L; ++l) alpha[l] = opts[l][idx[l]];
      per_frame[w].push_back(alpha);
      for (int l = L - 1; l >= 0; --l) {
        if (++idx[l] < opts[l].size()) break;
        idx[l] = 0;
      }
    }
  }

  // Block descent on the allocations of a fixed selection sequence.
  auto refine = [&](std::vector<FrameDecision>& frames, std::vector<double>& hist) {
    double F = window_objective(q0, forecast, frames, V, theta, cfg);
    hist.assign(1, F);
    int iters = 0;
    double eps = 0.0;
    for (int it = 1; it <= cfg.solver.gp_max_iterations; ++it) {
      for (int w = 0; w < W; ++w) {
        const auto u = block_weights(q0, forecast, frames, w, theta, cfg);
        FrameDecision cand = block_response(u, forecast, w, frames[w].alpha, V, sc);
        std::swap(frames[w], cand);
        const double F_new = window_objective(q0, forecast, frames, V, theta, cfg);
        if (accept_step(F_new, F, W)) {
          F = F_new;
        } else {
          std::swap(frames[w], cand);
        }
      }
      hist.push_back(F);
      iters = it;
      if (it == 1) eps = cfg.solver.gp_epsilon_rel * std::abs(F);
      if (W == 1) break;
      if (it >= 2 && hist[it - 1] - hist[it] <= eps) break;
    }
    return std::pair{F, iters};
  };

  WindowDecision best;
  best.F = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> seq(static_cast<std::size_t>(W), 0);
  for (std::size_t s = 0; s < total; ++s) {
    // For a fixed sequence F is not convex in the allocations, so descent is
    // started twice: from zero power and from the myopic plan that solves
    // each frame on its own propagated backlog.
    std::vector<FrameDecision> idle;
    std::vector<FrameDecision> myopic;
    for (int w = 0; w < W; ++w) {
      const auto& alpha = per_frame[w][seq[w]];
      idle.push_back(idle_frame(forecast, w, alpha, sc));
      myopic.push_back(idle.back());
    }
    for (int w = 0; w < W; ++w) {
      const auto q = window_queues(q0, forecast, myopic, cfg);
      myopic[w] = block_response(q[w], forecast, w, myopic[w].alpha, V, sc);
    }
    for (auto* frames : {&idle, &myopic}) {
      std::vector<double> hist;
      const auto [F, iters] = refine(*frames, hist);
      if (F < best.F) {
        best.frames = *frames;
        best.F = F;
        best.F_history = std::move(hist);
        best.iterations = iters;
      }
    }
    for (int w = W - 1; w >= 0; --w) {
      if (++seq[w] < per_frame[w].size()) break;
      seq[w] = 0;
    }
  }

  for (auto& f : best.frames) f.candidates = total;
  return best;
}

}  // namespace ensra
