#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/grid.hpp"
#include "ensra/topology.hpp"
#include "ensra/wifi.hpp"

namespace ensra {

/// One slot of macrocell allocation in compact form: each subchannel has at
/// most one owner, so x is implied by `owner`. Owners are global user ids,
/// -1 for an unused channel.
struct SlotAllocation {
  std::vector<int> owner;
  std::vector<double> power;  // W, per subchannel

  explicit SlotAllocation(int num_channels = 0)
      : owner(static_cast<std::size_t>(num_channels), -1),
        power(static_cast<std::size_t>(num_channels), 0.0) {}

  double total_power() const;
  friend bool operator==(const SlotAllocation&, const SlotAllocation&) = default;
};

/// Dense L x M form of a slot allocation.
struct ResourceAllocation {
  Grid<std::uint8_t> x;
  Grid<double> p;
};

ResourceAllocation to_matrices(const SlotAllocation& a, int num_users);

/// (B/M) sum_m x_m log2(1 + p_m h_m^2 / (N0 B/M)), Mbps.
double macrocell_rate(std::span<const std::uint8_t> x_row, std::span<const double> p_row,
                      std::span<const double> h_row, const SystemConfig& cfg);

/// Rate on one subchannel of bandwidth cfg.subchannel_bw().
double subchannel_rate(double power, double gain, const SystemConfig& cfg);

/// kappa * sum p, W.
double macrocell_power(const Grid<double>& p, const SystemConfig& cfg);
double macrocell_power(const SlotAllocation& a, const SystemConfig& cfg);

/// q'_l = max(q_l - served_l, 0) + arrived_l, all in Mb.
std::vector<double> step_queue(std::span<const double> q, std::span<const double> served,
                               std::span<const double> arrived);

/// Checks every selection and allocation constraint for one slot. Throws
/// ConstraintViolation naming the first one broken.
void validate_decision(std::span<const int> alpha, const SlotAllocation& alloc,
                       std::span<const int> locations, const Topology& topo,
                       const SystemConfig& cfg);
void validate_decision(std::span<const int> alpha, const ResourceAllocation& alloc,
                       std::span<const int> locations, const Topology& topo,
                       const SystemConfig& cfg);

/// Macrocell plus Wi-Fi power for one slot. Validates the allocation part of
/// the decision (budget, exclusivity, no power to Wi-Fi users).
double total_power(std::span<const int> alpha, const ResourceAllocation& alloc,
                   const SystemConfig& cfg, const WifiModel& wifi);
double total_power(std::span<const int> alpha, const SlotAllocation& alloc,
                   const SystemConfig& cfg, const WifiModel& wifi);

struct BoundConstants {
  double b1 = 0.0;           // Mb^2 per slot
  double b2 = 0.0;           // T * b1
  double r_max = 0.0;        // Mb per slot
  double p_max_total = 0.0;  // W
};

/// a_max_slot and r_max_slot are per-slot Mb.
BoundConstants bound_constants(int num_users, int frame_len, double a_max_slot,
                               double r_max_slot, double p_max_total);

/// Uses cfg.a_max() and r_max_mbps converted to per-slot Mb; P_max from the
/// cellular budget and the tabulated Wi-Fi maximum.
BoundConstants bound_constants(const SystemConfig& cfg, double r_max_mbps, const WifiModel& wifi);

/// Largest macrocell rate reachable with the whole budget on every channel at
/// gain h_max, or the best Wi-Fi per-user rate, whichever is larger.
double rate_upper_bound(double h_max, const SystemConfig& cfg, const WifiModel& wifi);

}  // namespace ensra
