#include "ensra/wifi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ensra/error.hpp"

namespace ensra {

namespace {

// tau as a function of the conditional collision probability p. Written as
// 2 / (1 + W + p W sum_{i<m} (2p)^i), which is the usual Bianchi expression
// with the (1 - 2p) factor cancelled, so p = 1/2 needs no special case.
double tau_of_p(double p, const DcfParams& dcf) {
  const double w = dcf.cw_min;
  double geo = 0.0;
  double term = 1.0;
  for (int i = 0; i < dcf.backoff_stages; ++i) {
    geo += term;
    term *= 2.0 * p;
  }
  return 2.0 / (1.0 + w + p * w * geo);
}

double p_of_tau(double tau, int rho) {
  return 1.0 - std::pow(1.0 - tau, rho - 1);
}

struct SlotMix {
  double idle = 0.0;     // 1 - Ptr
  double success = 0.0;  // Ptr * Ps
  double collide = 0.0;  // Ptr * (1 - Ps)
};

SlotMix slot_mix(int rho, double phi) {
  SlotMix s;
  if (rho == 0) {
    s.idle = 1.0;
    return s;
  }
  const double ptr = 1.0 - std::pow(1.0 - phi, rho);
  s.idle = 1.0 - ptr;
  s.success = rho * phi * std::pow(1.0 - phi, rho - 1);
  s.collide = ptr - s.success;
  return s;
}

double mean_slot_us(const SlotMix& s, const MacParams& mac) {
  return s.idle * mac.backoff_slot_us + s.success * mac.success_slot_us +
         s.collide * mac.collision_slot_us;
}

}  // namespace

PhiSolution solve_phi(int rho, const DcfParams& dcf) {
  if (rho < 1) throw DomainError("solve_phi needs at least one station, got " + std::to_string(rho));
  if (rho == 1) return {2.0 / (dcf.cw_min + 1.0), 0.0};

  // g(tau) = tau - tau_of_p(p(tau)) is increasing: p grows with tau and
  // tau_of_p falls with p. g(0) < 0 < g(1).
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = mid - tau_of_p(p_of_tau(mid, rho), dcf);
    (g < 0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  const double residual = std::abs(tau - tau_of_p(p_of_tau(tau, rho), dcf));
  if (!(residual < 1e-10)) {
    throw NumericalError("DCF fixed point did not converge for rho=" + std::to_string(rho) +
                         " (residual " + std::to_string(residual) + ")");
  }
  return {tau, residual};
}

double wifi_total_rate(int rho, double phi, const MacParams& mac) {
  if (rho <= 0) return 0.0;
  const SlotMix s = slot_mix(rho, phi);
  return s.success * mac.payload_bits / mean_slot_us(s, mac);
}

double wifi_power(int rho, double phi, const MacParams& mac) {
  const SlotMix s = slot_mix(rho, phi);
  double energy = s.idle * mac.backoff_energy_uj + s.success * mac.success_energy_uj;
  double binom = 0.5 * rho * (rho - 1);  // C(rho, 2)
  for (int j = 2; j <= rho; ++j) {
    const double pcj = binom * std::pow(phi, j) * std::pow(1.0 - phi, rho - j);
    energy += pcj * mac.collision_energy_uj(rho, j);
    binom = binom * (rho - j) / (j + 1);
  }
  return energy / mean_slot_us(s, mac);
}

WifiModel::WifiModel(const MacParams& mac, const DcfParams& dcf, int max_users) {
  if (max_users < 0) throw DomainError("max_users must be non-negative");
  const auto n = static_cast<std::size_t>(max_users) + 1;
  phi_.assign(n, 0.0);
  rate_.assign(n, 0.0);
  power_.assign(n, 0.0);
  power_[0] = wifi_power(0, 0.0, mac);
  for (int rho = 1; rho <= max_users; ++rho) {
    phi_[rho] = solve_phi(rho, dcf).phi;
    rate_[rho] = wifi_total_rate(rho, phi_[rho], mac);
    power_[rho] = wifi_power(rho, phi_[rho], mac);
  }
  max_rate_ = *std::max_element(rate_.begin(), rate_.end());
  max_power_ = *std::max_element(power_.begin(), power_.end());
}

std::vector<int> WifiModel::loads(std::span<const int> alpha, int num_wifi) {
  std::vector<int> count(static_cast<std::size_t>(num_wifi) + 1, 0);
  for (int a : alpha) {
    if (a < 0 || a > num_wifi) throw DomainError("network selection out of range");
    ++count[a];
  }
  return count;
}

double WifiModel::user_rate(std::span<const int> alpha, int user) const {
  const int ap = alpha[static_cast<std::size_t>(user)];
  if (ap == 0) throw DomainError("user " + std::to_string(user) + " is on the macrocell");
  const auto rho = std::count(alpha.begin(), alpha.end(), ap);
  return total_rate(static_cast<int>(rho)) / static_cast<double>(rho);
}

double WifiModel::total_power(std::span<const int> alpha, int num_wifi) const {
  const auto count = loads(alpha, num_wifi);
  double sum = 0.0;
  for (int n = 1; n <= num_wifi; ++n) sum += power(count[n]);
  return sum;
}

}  // namespace ensra
