#pragma once

// Slow reference computations used by the tests, the acceptance binary and
// `ensra validate`. None of them call the solver code they check.

#include <cstdint>
#include <span>
#include <vector>

#include "ensra/config.hpp"

namespace ensra::oracle {

/// DCF transmission probability by damped fixed-point iteration on the
/// uncancelled textbook form, in long double.
double phi_fixed_point(int rho, const DcfParams& dcf);

/// Throughput and power written term by term from the slot probabilities.
double wifi_rate_direct(int rho, double phi, const MacParams& mac);
double wifi_power_direct(int rho, double phi, const MacParams& mac);

struct CellParams {
  double v_kappa = 0.0;
  double p_max = 0.0;
  double bw = 0.0;         // per subchannel, MHz
  double noise_psd = 0.0;  // W/MHz
};

double channel_rate(double power, double gain, const CellParams& c);

/// One slot of the macrocell problem, K users by M channels.
struct SlotInstance {
  int users = 0;
  int channels = 0;
  std::vector<double> weights;  // K
  std::vector<double> gains;    // K x M
  CellParams cell;
};

/// max sum Q r - V kappa sum p over every 0/1 matrix with at most one user per
/// channel and every point of a `levels`-step power grid per channel with
/// sum p <= P.
double brute_force_slot(const SlotInstance& s, int levels = 200);

/// Same maximum over the assignments, but the powers of each assignment come
/// from a continuous water-fill found by bisection on the price.
double continuous_slot(const SlotInstance& s);

/// max_{p >= 0} Q bw log2(1 + p h^2/(N0 bw)) - c p by grid search and local
/// refinement.
double scalar_mu(double weight, double gain, double price, const CellParams& c);

/// min over lambda >= 0 of lambda P + sum_m max_l mu_lm(lambda) by grid and
/// refinement, with mu from scalar_mu. Returns the minimum value.
double dual_minimum(const SlotInstance& s);

/// Frame instance for exhaustive ENSRA: users either stay on the macrocell or
/// join one of the APs listed for them.
struct FrameInstance {
  SlotInstance slot_template;         // users, channels, cell; weights = backlogs
  std::vector<std::vector<int>> options;  // per user, allowed selections incl. 0
  std::vector<std::vector<double>> slot_gains;  // per slot, K x M
  int num_wifi = 0;
  double V = 0.0;
  MacParams mac;
  DcfParams dcf;
};

/// min over selections and per-slot (x, gridded p) of
/// V sum P - sum_l Q_l sum r_l for one frame.
double brute_force_frame(const FrameInstance& f, int levels = 200);

/// Stationary distribution of a row-stochastic matrix by power iteration.
std::vector<double> stationary(const std::vector<std::vector<double>>& P, int iterations = 100000,
                               double tol = 1e-14);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace ensra::oracle
