#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ensra/config.hpp"

namespace ensra {

/// Constants of the per-slot macrocell problem
///   max sum_l Q_l r_l - V kappa sum p   s.t. one user per channel, sum p <= P.
struct Stage2Params {
  double v_kappa = 0.0;    // V * kappa
  double p_max = 0.0;      // W
  double bw = 0.0;         // subchannel bandwidth, MHz
  double noise_psd = 0.0;  // W/MHz
  SolverParams solver;

  static Stage2Params from(const SystemConfig& cfg, double V);
};

/// K candidate users over M channels. Indices in results are local (0..K-1).
struct Stage2Problem {
  int num_users = 0;
  int num_channels = 0;
  std::span<const double> weights;  // K, non-negative
  std::span<const double> gains;    // K x M row-major

  double gain(int l, int m) const { return gains[static_cast<std::size_t>(l) * num_channels + m]; }
};

enum class ExtremeCase { kBudgetTight, kClosestBelow, kFallback };

const char* to_string(ExtremeCase c);

struct DualSolution {
  double lambda = 0.0;
  double value = 0.0;                          // D(lambda)
  std::vector<double> mu;                      // per channel, max_l mu_lm(lambda)
  std::vector<std::vector<int>> argmax_sets;   // per channel, sorted
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct ExtremePoint {
  std::vector<int> f;  // channel -> local user
  ExtremeCase used_case = ExtremeCase::kClosestBelow;
  std::size_t candidates = 0;
};

struct Stage2Result {
  std::vector<int> owner;     // channel -> local user, -1 if no users
  std::vector<double> power;  // W per channel
  double objective = 0.0;     // sum_l Q_l r_l - V kappa sum p, Mb^2/s
  double lambda = 0.0;
  ExtremeCase used_case = ExtremeCase::kClosestBelow;
};

/// max_{p >= 0} Q bw log2(1 + p h^2/(N0 bw)) - (V kappa + lambda) p.
double mu_lm(double lambda, double weight, double gain, const Stage2Params& prm);

/// Power attaining mu_lm.
double mu_power(double lambda, double weight, double gain, const Stage2Params& prm);

/// lambda P + sum_m max_l mu_lm(lambda). Convex in lambda.
double dual_value(double lambda, const Stage2Problem& pb, const Stage2Params& prm);

/// Minimizes the dual over lambda >= 0 by golden section; lambda = 0 when
/// the unpriced fill already fits the budget.
DualSolution solve_dual(const Stage2Problem& pb, const Stage2Params& prm);

/// Picks one user per channel from the argmax sets: a candidate whose fill at
/// lambda* meets the budget exactly if one exists, else the one closest to
/// the budget from below.
ExtremePoint select_extreme_point(const DualSolution& dual, const Stage2Problem& pb,
                                  const Stage2Params& prm);

/// Optimal powers for a fixed channel assignment under the budget.
std::vector<double> waterfill_given_assignment(std::span<const int> f, const Stage2Problem& pb,
                                               const Stage2Params& prm);

/// Objective value of a given assignment/power pair.
double stage2_objective(std::span<const int> owner, std::span<const double> power,
                        const Stage2Problem& pb, const Stage2Params& prm);

Stage2Result solve_stage2(const Stage2Problem& pb, const Stage2Params& prm);

}  // namespace ensra
