#include "ensra/cellular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ensra/error.hpp"

namespace ensra {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest lambda at which anyone still transmits: Q h^2/(N0 ln2) - V kappa.
double activity_limit(const Stage2Problem& pb, const Stage2Params& prm) {
  double hi = 0.0;
  for (int l = 0; l < pb.num_users; ++l) {
    for (int m = 0; m < pb.num_channels; ++m) {
      const double h = pb.gain(l, m);
      hi = std::max(hi, pb.weights[l] * h * h / (prm.noise_psd * kLn2));
    }
  }
  return std::max(hi - prm.v_kappa, 0.0);
}

// Per-channel best user at lambda, lowest index on ties.
int channel_argmax(double lambda, int m, const Stage2Problem& pb, const Stage2Params& prm,
                   double* best_mu) {
  int best = 0;
  double bv = -kInf;
  for (int l = 0; l < pb.num_users; ++l) {
    const double v = mu_lm(lambda, pb.weights[l], pb.gain(l, m), prm);
    if (v > bv) {
      bv = v;
      best = l;
    }
  }
  if (best_mu) *best_mu = bv;
  return best;
}

int strongest_user(int m, const Stage2Problem& pb) {
  int best = 0;
  double bv = -1.0;
  for (int l = 0; l < pb.num_users; ++l) {
    const double h = pb.gain(l, m);
    const double v = pb.weights[l] * h * h;
    if (v > bv) {
      bv = v;
      best = l;
    }
  }
  return best;
}

double assignment_power(double lambda, std::span<const int> f, const Stage2Problem& pb,
                        const Stage2Params& prm) {
  double s = 0.0;
  for (int m = 0; m < pb.num_channels; ++m) s += mu_power(lambda, pb.weights[f[m]], pb.gain(f[m], m), prm);
  return s;
}

}  // namespace

const char* to_string(ExtremeCase c) {
  switch (c) {
    case ExtremeCase::kBudgetTight: return "budget_tight";
    case ExtremeCase::kClosestBelow: return "closest_below";
    case ExtremeCase::kFallback: return "fallback";
  }
  return "unknown";
}

Stage2Params Stage2Params::from(const SystemConfig& cfg, double V) {
  Stage2Params p;
  p.v_kappa = V * cfg.kappa;
  p.p_max = cfg.p_max_cell;
  p.bw = cfg.subchannel_bw();
  p.noise_psd = cfg.noise_psd;
  p.solver = cfg.solver;
  return p;
}

double mu_lm(double lambda, double weight, double gain, const Stage2Params& prm) {
  if (weight <= 0 || gain <= 0) return 0.0;
  const double c = prm.v_kappa + lambda;
  if (c <= 0) return kInf;
  const double n = prm.noise_psd / (gain * gain);
  const double level = weight / (c * kLn2);
  if (level <= n) return 0.0;
  return prm.bw * (weight * std::log2(level / n) - c * (level - n));
}

double mu_power(double lambda, double weight, double gain, const Stage2Params& prm) {
  if (weight <= 0 || gain <= 0) return 0.0;
  const double c = prm.v_kappa + lambda;
  if (c <= 0) return kInf;
  const double n = prm.noise_psd / (gain * gain);
  return prm.bw * std::max(weight / (c * kLn2) - n, 0.0);
}

double dual_value(double lambda, const Stage2Problem& pb, const Stage2Params& prm) {
  double v = lambda * prm.p_max;
  for (int m = 0; m < pb.num_channels; ++m) {
    double best = 0.0;
    for (int l = 0; l < pb.num_users; ++l) best = std::max(best, mu_lm(lambda, pb.weights[l], pb.gain(l, m), prm));
    v += best;
  }
  return v;
}

DualSolution solve_dual(const Stage2Problem& pb, const Stage2Params& prm) {
  if (pb.num_users < 1) throw DomainError("solve_dual needs at least one user");
  for (int l = 0; l < pb.num_users; ++l) {
    if (!(pb.weights[l] >= 0)) throw DomainError("Stage II weights must be non-negative");
  }
  const int M = pb.num_channels;
  DualSolution sol;
  sol.mu.assign(static_cast<std::size_t>(M), 0.0);
  sol.argmax_sets.assign(static_cast<std::size_t>(M), {});

  const double hi = activity_limit(pb, prm);
  bool slack = hi <= 0;
  if (!slack && prm.v_kappa > 0) {
    double s = 0.0;
    for (int m = 0; m < M; ++m) {
      const int l = channel_argmax(0.0, m, pb, prm, nullptr);
      s += mu_power(0.0, pb.weights[l], pb.gain(l, m), prm);
    }
    slack = s <= prm.p_max;
  }

  double lam = 0.0;
  double a = 0.0;
  double b = 0.0;
  if (!slack) {
    // Golden section on the convex dual over [0, hi].
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    a = 0.0;
    b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = dual_value(x1, pb, prm);
    double f2 = dual_value(x2, pb, prm);
    const double tol = prm.solver.golden_rel_tol * hi;
    while (b - a > tol) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = dual_value(x1, pb, prm);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = dual_value(x2, pb, prm);
      }
    }
    lam = f1 <= f2 ? x1 : x2;
  }
  sol.lambda = lam;
  sol.bracket_lo = a;
  sol.bracket_hi = b;
  sol.value = dual_value(lam, pb, prm);

  // Endpoint probes; the lower end is nudged off zero when V kappa = 0 so
  // the water level stays finite.
  const double a_probe = (prm.v_kappa > 0 || a > 0) ? a : std::max(1e-12 * hi, 1e-300);
  for (int m = 0; m < M; ++m) {
    double best = 0.0;
    channel_argmax(lam, m, pb, prm, &best);
    sol.mu[m] = std::max(best, 0.0);
    auto& set = sol.argmax_sets[m];
    if (sol.mu[m] > 0) {
      const double cut = sol.mu[m] - prm.solver.tie_rel_tol * std::abs(sol.mu[m]);
      for (int l = 0; l < pb.num_users; ++l) {
        if (mu_lm(lam, pb.weights[l], pb.gain(l, m), prm) >= cut) set.push_back(l);
      }
    }
    if (!slack) {
      for (double probe : {a_probe, b}) {
        double v = 0.0;
        const int l = channel_argmax(probe, m, pb, prm, &v);
        if (v > 0) set.push_back(l);
      }
    }
    if (set.empty()) set.push_back(strongest_user(m, pb));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return sol;
}

ExtremePoint select_extreme_point(const DualSolution& dual, const Stage2Problem& pb,
                                  const Stage2Params& prm) {
  const int M = pb.num_channels;
  ExtremePoint ep;
  ep.f.assign(static_cast<std::size_t>(M), 0);

  std::size_t total = 1;
  bool overflow = false;
  for (const auto& s : dual.argmax_sets) {
    if (total > prm.solver.extreme_point_cap / s.size()) overflow = true;
    total *= s.size();
  }
  if (overflow || total > prm.solver.extreme_point_cap) {
    for (int m = 0; m < M; ++m) {
      double v = 0.0;
      const int l = channel_argmax(dual.lambda, m, pb, prm, &v);
      ep.f[m] = v > 0 ? l : strongest_user(m, pb);
    }
    ep.used_case = ExtremeCase::kFallback;
    ep.candidates = 0;
    return ep;
  }
  ep.candidates = total;

  std::vector<std::size_t> idx(static_cast<std::size_t>(M), 0);
  std::vector<int> f(static_cast<std::size_t>(M));
  std::vector<int> below, above;
  double below_s = -kInf;
  double above_s = kInf;
  const double P = prm.p_max;
  for (std::size_t c = 0; c < total; ++c) {
    for (int m = 0; m < M; ++m) f[m] = dual.argmax_sets[m][idx[m]];
    const double s = assignment_power(dual.lambda, f, pb, prm);
    const bool tight = (dual.lambda == 0 && s <= P) ||
                       std::abs(s - P) <= prm.solver.budget_rel_tol * P;
    if (tight) {
      ep.f = f;
      ep.used_case = ExtremeCase::kBudgetTight;
      return ep;
    }
    if (s <= P && s > below_s) {
      below_s = s;
      below = f;
    }
    if (s > P && s < above_s) {
      above_s = s;
      above = f;
    }
    for (int m = M - 1; m >= 0; --m) {
      if (++idx[m] < dual.argmax_sets[m].size()) break;
      idx[m] = 0;
    }
  }
  ep.f = below.empty() ? above : below;
  ep.used_case = ExtremeCase::kClosestBelow;
  return ep;
}

std::vector<double> waterfill_given_assignment(std::span<const int> f, const Stage2Problem& pb,
                                               const Stage2Params& prm) {
  const int M = pb.num_channels;
  if (static_cast<int>(f.size()) != M) throw ShapeError("assignment must cover every channel");
  std::vector<double> p(static_cast<std::size_t>(M), 0.0);
  // p_m(c) = (a_m / c - b_m)^+ with a = bw Q / ln2, b = bw N0 / h^2.
  std::vector<double> a(static_cast<std::size_t>(M), 0.0);
  std::vector<double> b(static_cast<std::size_t>(M), kInf);
  for (int m = 0; m < M; ++m) {
    if (f[m] < 0) continue;
    const double h = pb.gain(f[m], m);
    const double q = pb.weights[f[m]];
    if (q <= 0 || h <= 0) continue;
    a[m] = prm.bw * q / kLn2;
    b[m] = prm.bw * prm.noise_psd / (h * h);
  }
  auto fill = [&](double c) {
    double s = 0.0;
    for (int m = 0; m < M; ++m) {
      p[m] = a[m] > 0 ? std::max(a[m] / c - b[m], 0.0) : 0.0;
      s += p[m];
    }
    return s;
  };
  if (prm.v_kappa > 0 && fill(prm.v_kappa) <= prm.p_max) return p;

  // Budget binds: shrink the active set until the common level is consistent.
  std::vector<char> active(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) active[m] = a[m] > 0;
  double c = 0.0;
  for (;;) {
    double sa = 0.0;
    double sb = 0.0;
    for (int m = 0; m < M; ++m) {
      if (active[m]) {
        sa += a[m];
        sb += b[m];
      }
    }
    if (sa <= 0) {
      std::fill(p.begin(), p.end(), 0.0);
      return p;
    }
    c = sa / (prm.p_max + sb);
    bool dropped = false;
    for (int m = 0; m < M; ++m) {
      if (active[m] && a[m] <= c * b[m]) {
        active[m] = 0;
        dropped = true;
      }
    }
    if (!dropped) break;
  }
  if (!(c > 0) || !std::isfinite(c)) throw NumericalError("water level not finite");
  double s = 0.0;
  for (int m = 0; m < M; ++m) {
    p[m] = active[m] ? std::max(a[m] / c - b[m], 0.0) : 0.0;
    s += p[m];
  }
  if (s > prm.p_max) {
    for (double& v : p) v *= prm.p_max / s;
  }
  return p;
}

double stage2_objective(std::span<const int> owner, std::span<const double> power,
                        const Stage2Problem& pb, const Stage2Params& prm) {
  double v = 0.0;
  for (int m = 0; m < pb.num_channels; ++m) {
    const double p = power[m];
    if (owner[m] >= 0 && p > 0) {
      const double h = pb.gain(owner[m], m);
      v += pb.weights[owner[m]] * prm.bw * std::log2(1.0 + p * h * h / (prm.noise_psd * prm.bw));
    }
    v -= prm.v_kappa * p;
  }
  return v;
}

Stage2Result solve_stage2(const Stage2Problem& pb, const Stage2Params& prm) {
  Stage2Result r;
  r.owner.assign(static_cast<std::size_t>(pb.num_channels), -1);
  r.power.assign(static_cast<std::size_t>(pb.num_channels), 0.0);
  if (pb.num_users == 0) return r;
  const DualSolution dual = solve_dual(pb, prm);
  const ExtremePoint ep = select_extreme_point(dual, pb, prm);
  r.owner = ep.f;
  r.power = waterfill_given_assignment(ep.f, pb, prm);
  r.objective = stage2_objective(r.owner, r.power, pb, prm);
  r.lambda = dual.lambda;
  r.used_case = ep.used_case;
  return r;
}

}  // namespace ensra
