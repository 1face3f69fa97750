#pragma once

#include <span>
#include <vector>

#include "ensra/config.hpp"

namespace ensra {

struct PhiSolution {
  double phi = 0.0;
  double residual = 0.0;  // |tau - tau(p(tau))| at the returned point
};

/// Per-station transmission probability of saturated 802.11 DCF with `rho`
/// contending stations. Bisection on tau; rho == 1 is the collision-free
/// closed form 2/(cw_min+1). Throws DomainError for rho < 1 and
/// NumericalError if the residual does not reach 1e-10.
PhiSolution solve_phi(int rho, const DcfParams& dcf);

/// Aggregate AP throughput in Mbps for `rho` stations transmitting with
/// probability `phi`. Zero for rho == 0.
double wifi_total_rate(int rho, double phi, const MacParams& mac);

/// AP power draw in W for `rho` stations; Eb/Tb for an idle AP.
double wifi_power(int rho, double phi, const MacParams& mac);

/// Tabulated R(rho), P^W(rho) for rho = 0..max_users. All APs share one
/// parameter set, so one table serves every AP.
class WifiModel {
 public:
  WifiModel() = default;
  WifiModel(const MacParams& mac, const DcfParams& dcf, int max_users);
  explicit WifiModel(const SystemConfig& cfg) : WifiModel(cfg.mac, cfg.dcf, cfg.num_users) {}

  int max_users() const { return static_cast<int>(rate_.size()) - 1; }
  double phi(int rho) const { return phi_.at(static_cast<std::size_t>(rho)); }
  double total_rate(int rho) const { return rate_.at(static_cast<std::size_t>(rho)); }
  double power(int rho) const { return power_.at(static_cast<std::size_t>(rho)); }
  double max_rate() const { return max_rate_; }
  double max_power() const { return max_power_; }

  /// R(rho)/rho for a user sharing AP `alpha[user]`; throws DomainError if
  /// the user is on the macrocell.
  double user_rate(std::span<const int> alpha, int user) const;

  /// Sum over APs 1..num_wifi of P^W(load), idle APs included.
  double total_power(std::span<const int> alpha, int num_wifi) const;

  /// Per-AP user counts, index 0 is the macrocell.
  static std::vector<int> loads(std::span<const int> alpha, int num_wifi);

 private:
  std::vector<double> phi_;
  std::vector<double> rate_;
  std::vector<double> power_;
  double max_rate_ = 0.0;
  double max_power_ = 0.0;
};

}  // namespace ensra
