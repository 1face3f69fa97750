#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensra/cellular.hpp"
#include "ensra/config.hpp"
#include "ensra/env.hpp"
#include "ensra/model.hpp"

namespace ensra {

/// Bitmask over users; bit l set means user l is on the macrocell.
using UserMask = std::uint32_t;

struct SlotSolution {
  SlotAllocation alloc;            // global user ids
  std::vector<double> user_rate;   // Mbps per user (zero outside the mask)
  double objective = 0.0;          // sum Q r - V kappa sum p over the mask
  double cell_power = 0.0;         // sum p, W
};

/// Solves Stage II for the users in `mask` at one slot. Negative weights are
/// clipped to zero: such users never gain from service.
SlotSolution solve_slot(UserMask mask, std::span<const double> weights,
                        std::span<const double> gains_lm, const SystemConfig& cfg,
                        const Stage2Params& prm);

/// Stage II solutions for every (mask, slot) pair of one frame.
struct Stage2Table {
  std::vector<UserMask> masks;
  int num_slots = 0;
  std::vector<SlotSolution> entries;  // masks.size() x num_slots
  std::vector<double> frame_objective;  // per mask, sum over slots

  const SlotSolution& at(std::size_t mask_index, int slot) const {
    return entries[mask_index * static_cast<std::size_t>(num_slots) + static_cast<std::size_t>(slot)];
  }
};

enum class KernelMode { kSerial, kParallel };

/// Slots [first_slot, first_slot + num_slots) of `env`. The serial and
/// parallel variants produce identical tables.
Stage2Table stage2_table_serial(std::span<const UserMask> masks, std::span<const double> weights,
                                const EnvTrace& env, int first_slot, int num_slots,
                                const SystemConfig& cfg, const Stage2Params& prm);
Stage2Table stage2_table_parallel(std::span<const UserMask> masks, std::span<const double> weights,
                                  const EnvTrace& env, int first_slot, int num_slots,
                                  const SystemConfig& cfg, const Stage2Params& prm);
Stage2Table stage2_table(KernelMode mode, std::span<const UserMask> masks,
                         std::span<const double> weights, const EnvTrace& env, int first_slot,
                         int num_slots, const SystemConfig& cfg, const Stage2Params& prm);

}  // namespace ensra
