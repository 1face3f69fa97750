#include "ensra/frame_kernels.hpp"

#include <algorithm>

#include "ensra/error.hpp"

namespace ensra {

SlotSolution solve_slot(UserMask mask, std::span<const double> weights,
                        std::span<const double> gains_lm, const SystemConfig& cfg,
                        const Stage2Params& prm) {
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  SlotSolution out{SlotAllocation(M), std::vector<double>(static_cast<std::size_t>(L), 0.0)};

  int users[32];
  double w[32];
  double g[32 * 64];
  if (M > 64) throw ScaleError("at most 64 subchannels supported");
  int K = 0;
  for (int l = 0; l < L; ++l) {
    if (!(mask >> l & 1u)) continue;
    users[K] = l;
    w[K] = std::max(weights[l], 0.0);
    std::copy_n(gains_lm.begin() + static_cast<std::ptrdiff_t>(l) * M, M, g + K * M);
    ++K;
  }
  if (K == 0) return out;

  const Stage2Problem pb{K, M, {w, static_cast<std::size_t>(K)},
                         {g, static_cast<std::size_t>(K) * M}};
  const Stage2Result r = solve_stage2(pb, prm);
  for (int m = 0; m < M; ++m) {
    const int k = r.owner[m];
    if (k < 0) continue;
    out.alloc.owner[m] = users[k];
    out.alloc.power[m] = r.power[m];
    out.cell_power += r.power[m];
    if (r.power[m] > 0) out.user_rate[users[k]] += subchannel_rate(r.power[m], pb.gain(k, m), cfg);
  }
  out.objective = r.objective;
  return out;
}

namespace {

Stage2Table make_table(std::span<const UserMask> masks, int num_slots) {
  Stage2Table t;
  t.masks.assign(masks.begin(), masks.end());
  t.num_slots = num_slots;
  t.entries.resize(masks.size() * static_cast<std::size_t>(num_slots));
  t.frame_objective.assign(masks.size(), 0.0);
  return t;
}

void sum_objectives(Stage2Table& t) {
  for (std::size_t i = 0; i < t.masks.size(); ++i) {
    double s = 0.0;
    for (int tau = 0; tau < t.num_slots; ++tau) s += t.at(i, tau).objective;
    t.frame_objective[i] = s;
  }
}

}  // namespace

Stage2Table stage2_table_serial(std::span<const UserMask> masks, std::span<const double> weights,
                                const EnvTrace& env, int first_slot, int num_slots,
                                const SystemConfig& cfg, const Stage2Params& prm) {
  Stage2Table t = make_table(masks, num_slots);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (int tau = 0; tau < num_slots; ++tau) {
      t.entries[i * num_slots + tau] =
          solve_slot(masks[i], weights, env.gains(first_slot + tau), cfg, prm);
    }
  }
  sum_objectives(t);
  return t;
}

Stage2Table stage2_table_parallel(std::span<const UserMask> masks, std::span<const double> weights,
                                  const EnvTrace& env, int first_slot, int num_slots,
                                  const SystemConfig& cfg, const Stage2Params& prm) {
  Stage2Table t = make_table(masks, num_slots);
  const long long n = static_cast<long long>(masks.size()) * num_slots;
  // Each entry is written by exactly one iteration; per-mask sums happen
  // afterwards in a fixed order, so the result matches the serial table bit
  // for bit.
#pragma omp parallel for schedule(dynamic, 8)
  for (long long j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j / num_slots);
    const int tau = static_cast<int>(j % num_slots);
    t.entries[static_cast<std::size_t>(j)] =
        solve_slot(masks[i], weights, env.gains(first_slot + tau), cfg, prm);
  }
  sum_objectives(t);
  return t;
}

Stage2Table stage2_table(KernelMode mode, std::span<const UserMask> masks,
                         std::span<const double> weights, const EnvTrace& env, int first_slot,
                         int num_slots, const SystemConfig& cfg, const Stage2Params& prm) {
  return mode == KernelMode::kParallel
             ? stage2_table_parallel(masks, weights, env, first_slot, num_slots, cfg, prm)
             : stage2_table_serial(masks, weights, env, first_slot, num_slots, cfg, prm);
}

}  // namespace ensra
