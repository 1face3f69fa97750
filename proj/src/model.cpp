#include "ensra/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ensra/error.hpp"

namespace ensra {

double SlotAllocation::total_power() const {
  return std::accumulate(power.begin(), power.end(), 0.0);
}

ResourceAllocation to_matrices(const SlotAllocation& a, int num_users) {
  const auto m = a.owner.size();
  ResourceAllocation r{Grid<std::uint8_t>(static_cast<std::size_t>(num_users), m, 0),
                       Grid<double>(static_cast<std::size_t>(num_users), m, 0.0)};
  for (std::size_t c = 0; c < m; ++c) {
    const int u = a.owner[c];
    if (u < 0) continue;
    if (u >= num_users) throw ShapeError("channel owner " + std::to_string(u) + " out of range");
    r.x(static_cast<std::size_t>(u), c) = 1;
    r.p(static_cast<std::size_t>(u), c) = a.power[c];
  }
  return r;
}

double subchannel_rate(double power, double gain, const SystemConfig& cfg) {
  if (power < 0 || gain < 0) throw DomainError("negative power or gain");
  const double w = cfg.subchannel_bw();
  return w * std::log2(1.0 + power * gain * gain / (cfg.noise_psd * w));
}

double macrocell_rate(std::span<const std::uint8_t> x_row, std::span<const double> p_row,
                      std::span<const double> h_row, const SystemConfig& cfg) {
  if (x_row.size() != p_row.size() || p_row.size() != h_row.size()) {
    throw ShapeError("macrocell_rate: row lengths differ");
  }
  double r = 0.0;
  for (std::size_t m = 0; m < x_row.size(); ++m) {
    if (p_row[m] < 0 || h_row[m] < 0) throw DomainError("negative power or gain");
    if (x_row[m]) r += subchannel_rate(p_row[m], h_row[m], cfg);
  }
  return r;
}

double macrocell_power(const Grid<double>& p, const SystemConfig& cfg) {
  double sum = 0.0;
  for (double v : p.values()) sum += v;
  return cfg.kappa * sum;
}

double macrocell_power(const SlotAllocation& a, const SystemConfig& cfg) {
  return cfg.kappa * a.total_power();
}

std::vector<double> step_queue(std::span<const double> q, std::span<const double> served,
                               std::span<const double> arrived) {
  if (q.size() != served.size() || q.size() != arrived.size()) {
    throw ShapeError("step_queue: vector lengths differ");
  }
  std::vector<double> next(q.size());
  for (std::size_t l = 0; l < q.size(); ++l) {
    if (served[l] < 0 || arrived[l] < 0) throw DomainError("negative service or arrival");
    next[l] = std::max(q[l] - served[l], 0.0) + arrived[l];
  }
  return next;
}

namespace {

constexpr double kBudgetSlack = 1e-9;

void check_selection(std::span<const int> alpha, std::span<const int> locations,
                     const Topology& topo, const SystemConfig& cfg) {
  if (static_cast<int>(alpha.size()) != cfg.num_users ||
      static_cast<int>(locations.size()) != cfg.num_users) {
    throw ShapeError("selection and location vectors must have one entry per user");
  }
  for (int l = 0; l < cfg.num_users; ++l) {
    const int a = alpha[l];
    if (a == 0) continue;
    if (a < 0 || a > cfg.num_wifi || !topo.covers(locations[l], a)) {
      throw ConstraintViolation("network availability",
                                "user " + std::to_string(l) + " selected Wi-Fi " +
                                    std::to_string(a) + " not available at location " +
                                    std::to_string(locations[l]));
    }
  }
}

void check_allocation(std::span<const int> alpha, const ResourceAllocation& a,
                      const SystemConfig& cfg) {
  const auto users = static_cast<std::size_t>(cfg.num_users);
  const auto chans = static_cast<std::size_t>(cfg.num_subchannels);
  if (a.x.rows() != users || a.x.cols() != chans || a.p.rows() != users || a.p.cols() != chans) {
    throw ShapeError("allocation must be num_users x num_subchannels");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < chans; ++m) {
    int holders = 0;
    for (std::size_t l = 0; l < users; ++l) {
      const double p = a.p(l, m);
      if (!(p >= 0)) {
        throw ConstraintViolation("power nonnegativity", "p[" + std::to_string(l) + "][" +
                                                             std::to_string(m) + "] < 0");
      }
      if (p > 0 && !a.x(l, m)) {
        throw ConstraintViolation("power needs subchannel", "user " + std::to_string(l) +
                                                                " has power on unassigned channel " +
                                                                std::to_string(m));
      }
      if (alpha[l] != 0 && (a.x(l, m) || p > 0)) {
        throw ConstraintViolation("macrocell-only allocation",
                                  "Wi-Fi user " + std::to_string(l) + " holds channel " +
                                      std::to_string(m));
      }
      holders += a.x(l, m) ? 1 : 0;
      total += p;
    }
    if (holders > 1) {
      throw ConstraintViolation("subchannel exclusivity",
                                "channel " + std::to_string(m) + " has " +
                                    std::to_string(holders) + " users");
    }
  }
  if (total > cfg.p_max_cell + kBudgetSlack) {
    throw ConstraintViolation("power budget", std::to_string(total) + " W exceeds " +
                                                  std::to_string(cfg.p_max_cell) + " W");
  }
}

// The dense form cannot represent power on an unowned channel, so the compact
// form is checked for it before conversion.
void check_compact(const SlotAllocation& a, const SystemConfig& cfg) {
  if (static_cast<int>(a.owner.size()) != cfg.num_subchannels || a.power.size() != a.owner.size()) {
    throw ShapeError("allocation must cover every subchannel");
  }
  for (std::size_t m = 0; m < a.owner.size(); ++m) {
    if (a.owner[m] < 0 && a.power[m] != 0) {
      throw ConstraintViolation("power needs subchannel",
                                "unassigned channel " + std::to_string(m) + " carries power");
    }
  }
}

}  // namespace

void validate_decision(std::span<const int> alpha, const ResourceAllocation& alloc,
                       std::span<const int> locations, const Topology& topo,
                       const SystemConfig& cfg) {
  check_selection(alpha, locations, topo, cfg);
  check_allocation(alpha, alloc, cfg);
}

void validate_decision(std::span<const int> alpha, const SlotAllocation& alloc,
                       std::span<const int> locations, const Topology& topo,
                       const SystemConfig& cfg) {
  check_compact(alloc, cfg);
  validate_decision(alpha, to_matrices(alloc, cfg.num_users), locations, topo, cfg);
}

double total_power(std::span<const int> alpha, const ResourceAllocation& alloc,
                   const SystemConfig& cfg, const WifiModel& wifi) {
  if (static_cast<int>(alpha.size()) != cfg.num_users) throw ShapeError("alpha length != L");
  check_allocation(alpha, alloc, cfg);
  return macrocell_power(alloc.p, cfg) + wifi.total_power(alpha, cfg.num_wifi);
}

double total_power(std::span<const int> alpha, const SlotAllocation& alloc,
                   const SystemConfig& cfg, const WifiModel& wifi) {
  check_compact(alloc, cfg);
  return total_power(alpha, to_matrices(alloc, cfg.num_users), cfg, wifi);
}

BoundConstants bound_constants(int num_users, int frame_len, double a_max_slot,
                               double r_max_slot, double p_max_total) {
  BoundConstants b;
  b.b1 = 0.5 * num_users * (a_max_slot * a_max_slot + r_max_slot * r_max_slot);
  b.b2 = frame_len * b.b1;
  b.r_max = r_max_slot;
  b.p_max_total = p_max_total;
  return b;
}

BoundConstants bound_constants(const SystemConfig& cfg, double r_max_mbps, const WifiModel& wifi) {
  const double p_max = cfg.kappa * cfg.p_max_cell + cfg.num_wifi * wifi.max_power();
  return bound_constants(cfg.num_users, cfg.frame_len, cfg.a_max() * cfg.slot_dt,
                         r_max_mbps * cfg.slot_dt, p_max);
}

double rate_upper_bound(double h_max, const SystemConfig& cfg, const WifiModel& wifi) {
  const double w = cfg.subchannel_bw();
  const double cell = cfg.num_subchannels * w *
                      std::log2(1.0 + cfg.p_max_cell * h_max * h_max / (cfg.noise_psd * w));
  double best_wifi = 0.0;
  for (int rho = 1; rho <= wifi.max_users(); ++rho) {
    best_wifi = std::max(best_wifi, wifi.total_rate(rho) / rho);
  }
  return std::max(cell, best_wifi);
}

}  // namespace ensra
