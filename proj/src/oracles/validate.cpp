#include "oracles/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ensra/cellular.hpp"
#include "ensra/env.hpp"
#include "ensra/error.hpp"
#include "ensra/rng.hpp"
#include "ensra/schedulers.hpp"
#include "ensra/window.hpp"
#include "ensra/wifi.hpp"
#include "oracles/oracles.hpp"

namespace ensra::check {

namespace {

double rel(double num, double den) { return num / std::max(std::abs(den), 1e-12); }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

constexpr double kVChoices[] = {0.0, 0.1, 0.5, 2.0, 10.0};

double pick_v(Rng& rng) { return kVChoices[uniform_int(rng, 5)]; }

SystemConfig resized(const SystemConfig& base, int L, int N, int M, int T) {
  SystemConfig c = base;
  c.num_users = L;
  c.num_wifi = N;
  c.num_subchannels = M;
  c.frame_len = T;
  c.wifi_cells.clear();
  c.validate();
  return c;
}

oracle::CellParams cell_of(const Stage2Params& prm) {
  return {prm.v_kappa, prm.p_max, prm.bw, prm.noise_psd};
}

oracle::SlotInstance random_slot(const SystemConfig& cfg, Rng& rng, Stage2Params& prm) {
  oracle::SlotInstance s;
  s.users = 1 + uniform_int(rng, 2);
  s.channels = 1 + uniform_int(rng, 2);
  prm = Stage2Params::from(cfg, pick_v(rng));
  prm.bw = cfg.bandwidth_mhz / s.channels;
  s.cell = cell_of(prm);
  for (int l = 0; l < s.users; ++l) s.weights.push_back(uniform(rng, 0.5, 40.0));
  for (int k = 0; k < s.users * s.channels; ++k) {
    s.gains.push_back(sample_channel(uniform(rng, cfg.min_distance_m, 42.0), rng, cfg));
  }
  return s;
}

Stage2Problem problem_of(const oracle::SlotInstance& s) {
  return {s.users, s.channels, s.weights, s.gains};
}

// One-frame trace at random locations; a user sits in a covered cell with
// probability `covered` when any AP exists.
EnvTrace random_frames(const SystemConfig& cfg, const Topology& topo, int frames, Rng& rng,
                       double covered) {
  EnvTrace env(cfg.num_users, cfg.num_subchannels, cfg.frame_len, frames);
  std::vector<int> covered_cells;
  for (int s = 0; s < topo.num_locations(); ++s) {
    if (!topo.wifi_coverage[s].empty()) covered_cells.push_back(s);
  }
  for (int k = 0; k < frames; ++k) {
    for (int l = 0; l < cfg.num_users; ++l) {
      int loc = uniform_int(rng, topo.num_locations());
      if (!covered_cells.empty() && uniform01(rng) < covered) {
        loc = covered_cells[uniform_int(rng, static_cast<int>(covered_cells.size()))];
      }
      env.location[static_cast<std::size_t>(k) * cfg.num_users + l] = loc;
    }
  }
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  const ArrivalChain chain(cfg.mean_arrival, cfg.arrival_stay);
  for (int t = 0; t < env.num_slots(); ++t) {
    const auto loc = env.locations(t / cfg.frame_len);
    for (int l = 0; l < L; ++l) {
      for (int m = 0; m < M; ++m) {
        env.gain[(static_cast<std::size_t>(t) * L + l) * M + m] =
            sample_channel(topo.distance_m[loc[l]], rng, cfg);
      }
      env.arrival[static_cast<std::size_t>(t) * L + l] =
          chain.value(uniform_int(rng, ArrivalChain::kStates));
    }
  }
  return env;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

BianchiStats compare_bianchi(const SystemConfig& cfg, int max_rho) {
  BianchiStats s;
  s.phi1_error = std::abs(solve_phi(1, cfg.dcf).phi - 2.0 / (cfg.dcf.cw_min + 1.0));
  for (int rho = 1; rho <= max_rho; ++rho) {
    const PhiSolution sol = solve_phi(rho, cfg.dcf);
    s.worst_residual = std::max(s.worst_residual, sol.residual);
    s.worst_phi_gap =
        std::max(s.worst_phi_gap, std::abs(sol.phi - oracle::phi_fixed_point(rho, cfg.dcf)));
    const double r = wifi_total_rate(rho, sol.phi, cfg.mac);
    const double rd = oracle::wifi_rate_direct(rho, sol.phi, cfg.mac);
    s.worst_rate_rel = std::max(s.worst_rate_rel, std::abs(rel(r - rd, rd)));
    const double p = wifi_power(rho, sol.phi, cfg.mac);
    const double pd = oracle::wifi_power_direct(rho, sol.phi, cfg.mac);
    s.worst_power_rel = std::max(s.worst_power_rel, std::abs(rel(p - pd, pd)));
  }
  const double p0 = wifi_power(0, 0.0, cfg.mac);
  const double p0d = oracle::wifi_power_direct(0, 0.0, cfg.mac);
  s.worst_power_rel = std::max(s.worst_power_rel, std::abs(rel(p0 - p0d, p0d)));
  return s;
}

Stage2Stats compare_stage2(const SystemConfig& cfg, int instances, std::uint64_t seed,
                           double rel_tol) {
  Rng rng = make_rng(seed, Stream::kMonteCarlo);
  Stage2Stats s;
  for (int i = 0; i < instances; ++i) {
    Stage2Params prm;
    const auto inst = random_slot(cfg, rng, prm);
    const Stage2Result res = solve_stage2(problem_of(inst), prm);
    // Re-evaluate the reported allocation with the oracle's rate formula.
    const std::vector<double>& p = res.power;
    double value = 0.0;
    for (int m = 0; m < inst.channels; ++m) {
      const int u = res.owner[m];
      if (u < 0) continue;
      value += inst.weights[u] * oracle::channel_rate(p[m], inst.gains[u * inst.channels + m], inst.cell) -
               inst.cell.v_kappa * p[m];
    }
    const double grid = oracle::brute_force_slot(inst);
    const double cont = oracle::continuous_slot(inst);
    const double shortfall = rel(grid - value, grid);
    const double excess = rel(value - cont, cont);
    s.worst_shortfall = std::max(s.worst_shortfall, shortfall);
    s.worst_excess = std::max(s.worst_excess, excess);
    s.worst_gap = std::max(s.worst_gap, -excess);
    double sum = 0.0;
    for (double v : p) sum += v;
    if (shortfall > rel_tol || excess > 1e-9 || sum > prm.p_max * (1 + 1e-9)) ++s.failures;
    ++s.instances;
  }
  return s;
}

DualityStats compare_duality(const SystemConfig& cfg, int instances, std::uint64_t seed,
                             double rel_tol) {
  Rng rng = make_rng(seed + 1000, Stream::kMonteCarlo);
  DualityStats s;
  for (int i = 0; i < instances; ++i) {
    Stage2Params prm;
    const auto inst = random_slot(cfg, rng, prm);
    const auto pb = problem_of(inst);
    const DualSolution dual = solve_dual(pb, prm);
    const double dmin = oracle::dual_minimum(inst);
    const double dual_rel = rel(dual.value - dmin, dmin);
    s.worst_dual_rel = std::max(s.worst_dual_rel, std::abs(dual_rel));

    double mu_rel = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double lambda = k == 0 ? dual.lambda : uniform(rng, 0.0, 50.0);
      for (int l = 0; l < inst.users; ++l) {
        for (int m = 0; m < inst.channels; ++m) {
          const double g = inst.gains[l * inst.channels + m];
          const double price = prm.v_kappa + lambda;
          if (price <= 0) continue;
          const double a = mu_lm(lambda, inst.weights[l], g, prm);
          const double b = oracle::scalar_mu(inst.weights[l], g, price, inst.cell);
          mu_rel = std::max(mu_rel, std::abs(rel(a - b, std::max(b, 1e-9 * inst.weights[l]))));
        }
      }
    }
    s.worst_mu_rel = std::max(s.worst_mu_rel, mu_rel);

    const double primal = solve_stage2(pb, prm).objective;
    const double weak = rel(primal - dual.value, dual.value);
    s.worst_weak = std::max(s.worst_weak, weak);
    if (std::abs(dual_rel) > rel_tol || mu_rel > 1e-9 || weak > 1e-9) ++s.failures;
    ++s.instances;
  }
  return s;
}

EnsraStats compare_ensra(const SystemConfig& base, int instances, std::uint64_t seed,
                         double rel_tol) {
  Rng rng = make_rng(seed + 2000, Stream::kMonteCarlo);
  EnsraStats s;
  for (int i = 0; i < instances; ++i) {
    SystemConfig cfg = resized(base, 2, 1, 2, 2);
    const Scenario sc = Scenario::make(cfg, make_topology(cfg, seed + 31 * i));
    const EnvTrace env = random_frames(cfg, sc.topo, 1, rng, 0.7);
    std::vector<double> q{uniform(rng, 0.0, 30.0), uniform(rng, 0.0, 30.0)};
    const double V = pick_v(rng);
    const FrameDecision d = ensra_frame(q, env, 0, V, sc, KernelMode::kSerial);

    oracle::FrameInstance f;
    f.slot_template.users = 2;
    f.slot_template.channels = 2;
    f.slot_template.weights = q;
    Stage2Params prm = Stage2Params::from(cfg, V);
    f.slot_template.cell = cell_of(prm);
    f.options = selection_options(env.locations(0), sc.topo);
    for (int t = 0; t < cfg.frame_len; ++t) {
      const auto g = env.gains(t);
      f.slot_gains.emplace_back(g.begin(), g.end());
    }
    f.num_wifi = cfg.num_wifi;
    f.V = V;
    f.mac = cfg.mac;
    f.dcf = cfg.dcf;
    const double bf = oracle::brute_force_frame(f);
    const double shortfall = rel(d.objective - bf, bf);
    s.worst_shortfall = std::max(s.worst_shortfall, shortfall);
    if (shortfall > rel_tol) ++s.failures;
    ++s.instances;
  }
  return s;
}

GpStats check_gp_monotone(const SystemConfig& base, int windows, std::uint64_t seed) {
  SystemConfig cfg = resized(base, 3, 2, 3, 10);
  cfg.window = 3;
  Rng rng = make_rng(seed + 3000, Stream::kMonteCarlo);
  GpStats s;
  long long iters = 0;
  for (int i = 0; i < windows; ++i) {
    const Scenario sc = Scenario::make(cfg, make_topology(cfg, seed + 17 * i));
    const EnvTrace fc = random_frames(cfg, sc.topo, cfg.window, rng, 0.6);
    std::vector<double> q0(3);
    for (double& v : q0) v = uniform(rng, 0.0, 3.0);
    const double V = pick_v(rng);
    const double theta = uniform01(rng) < 0.5 ? 0.0 : uniform(rng, 0.0, 2.0);
    const WindowDecision wd = gp_ensra_window(q0, fc, V, theta, sc, KernelMode::kSerial);
    bool ok = true;
    for (std::size_t k = 1; k < wd.F_history.size(); ++k) {
      if (wd.F_history[k] > wd.F_history[k - 1]) ok = false;
    }
    if (window_objective(q0, fc, wd.frames, V, theta, cfg) != wd.F) ok = false;
    if (!ok) ++s.monotone_violations;
    if (wd.iterations >= cfg.solver.gp_max_iterations) ++s.hit_cap;
    s.max_iterations = std::max(s.max_iterations, wd.iterations);
    iters += wd.iterations;
    ++s.windows;
  }
  s.mean_iterations = s.windows ? static_cast<double>(iters) / s.windows : 0.0;
  return s;
}

HeavyStats check_gp_heavy(const SystemConfig& base, int instances, std::uint64_t seed) {
  SystemConfig cfg = resized(base, 3, 2, 3, 10);
  cfg.window = 3;
  cfg.solver.gp_max_iterations = 1;
  Rng rng = make_rng(seed + 4000, Stream::kMonteCarlo);
  HeavyStats s;
  for (int i = 0; i < instances; ++i) {
    const Scenario sc = Scenario::make(cfg, make_topology(cfg, seed + 13 * i));
    const EnvTrace fc = random_frames(cfg, sc.topo, cfg.window, rng, 0.6);
    double h_max = 0.0;
    for (double g : fc.gain) h_max = std::max(h_max, g);
    const double need = fc.num_slots() * rate_upper_bound(h_max, cfg, sc.wifi) * cfg.slot_dt;
    std::vector<double> q0(3);
    for (double& v : q0) v = need * uniform(rng, 1.0, 3.0);
    const double V = pick_v(rng);
    const double theta = uniform(rng, 0.0, 2.0);
    ++s.instances;
    if (!heavy_traffic(q0, fc, sc)) {
      ++s.not_heavy;
      continue;
    }

    const WindowDecision wd = gp_ensra_window(q0, fc, V, theta, sc, KernelMode::kSerial);

    // Replay the sweep with plain reweighted ENSRA solves.
    std::vector<FrameDecision> frames;
    const std::vector<int> macro(3, 0);
    for (int w = 0; w < cfg.window; ++w) {
      FrameDecision d;
      d.alpha = macro;
      d.slots.assign(static_cast<std::size_t>(cfg.frame_len), SlotAllocation(cfg.num_subchannels));
      evaluate_decision(d, fc, w * cfg.frame_len, sc);
      frames.push_back(std::move(d));
    }
    for (int w = 0; w < cfg.window; ++w) {
      const auto u = block_weights(q0, fc, frames, w, theta, cfg);

      // F minus the reweighted objective must not depend on the candidate.
      const FrameCandidates c = enumerate_frame(u, fc, w, V, sc, KernelMode::kSerial);
      double lo = INFINITY, hi = -INFINITY, scale = 0.0;
      for (std::size_t k = 0; k < c.alphas.size(); ++k) {
        auto trial = frames;
        trial[w] = materialize(c, k, sc);
        const double F = window_objective(q0, fc, trial, V, theta, cfg);
        lo = std::min(lo, F - c.objective[k]);
        hi = std::max(hi, F - c.objective[k]);
        scale = std::max(scale, std::abs(F));
      }
      s.worst_reduction = std::max(s.worst_reduction, rel(hi - lo, scale));

      frames[w] = ensra_frame_weighted(u, fc, w, V, sc, KernelMode::kSerial);
    }
    for (int w = 0; w < cfg.window; ++w) {
      if (frames[w].alpha != wd.frames[w].alpha || frames[w].slots != wd.frames[w].slots) {
        ++s.step_mismatches;
        break;
      }
    }
  }
  return s;
}

SingleFrameStats check_gp_single_frame(const SystemConfig& base) {
  SystemConfig cfg = base;
  cfg.window = 1;
  cfg.theta = 0.0;
  cfg.prediction_error = 0.0;
  cfg.validate();
  RunOptions opts;
  opts.record_series = true;
  const Scenario sc = Scenario::make(cfg);
  const EnvTrace trace = generate_trace(cfg, sc.topo);
  const RunMetrics a = run(sc, trace, Algorithm::kEnsra, opts);
  const RunMetrics b = run(sc, trace, Algorithm::kGpEnsra, opts);
  SingleFrameStats s;
  s.identical = true;
  for (std::size_t k = 0; k < a.series.size() && s.identical; ++k) {
    const auto& x = a.series[k];
    const auto& y = b.series[k];
    if (x.alpha != y.alpha || x.queue != y.queue || x.avg_power != y.avg_power) {
      s.identical = false;
      s.detail = "trajectories diverge at frame " + std::to_string(k);
    }
  }
  if (s.identical && (a.avg_power != b.avg_power || a.avg_queue_slot != b.avg_queue_slot ||
                      a.final_queue_mb != b.final_queue_mb)) {
    s.identical = false;
    s.detail = "summary metrics differ";
  }
  if (s.identical) s.detail = std::to_string(a.series.size()) + " frames identical";
  return s;
}

ExactStats compare_exact_greedy(const SystemConfig& base, int windows, std::uint64_t seed) {
  SystemConfig cfg = resized(base, 2, 1, 2, 5);
  cfg.window = 2;
  Rng rng = make_rng(seed + 5000, Stream::kMonteCarlo);
  ExactStats s;
  std::vector<double> gaps;
  for (int i = 0; i < windows; ++i) {
    const Scenario sc = Scenario::make(cfg, make_topology(cfg, seed + 7 * i));
    const EnvTrace fc = random_frames(cfg, sc.topo, cfg.window, rng, 0.7);
    std::vector<double> q0(2);
    for (double& v : q0) v = uniform(rng, 0.0, 3.0);
    const double V = pick_v(rng);
    const double theta = uniform01(rng) < 0.5 ? 0.0 : uniform(rng, 0.0, 2.0);
    const double greedy = gp_ensra_window(q0, fc, V, theta, sc, KernelMode::kSerial).F;
    const double exact = p_ensra_exact(q0, fc, V, theta, sc).F;
    const double excess = rel(exact - greedy, greedy);
    s.worst_excess = std::max(s.worst_excess, excess);
    if (excess > 1e-12) ++s.violations;
    gaps.push_back(rel(greedy - exact, exact));
    ++s.windows;
  }
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    s.median_gap = n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
    s.max_gap = gaps.back();
  }
  return s;
}

double conservation_error(const RunMetrics& m) {
  double worst = 0.0;
  for (std::size_t l = 0; l < m.arrived_mb.size(); ++l) {
    const double diff = m.arrived_mb[l] - m.served_mb[l] - m.final_queue_mb[l];
    worst = std::max(worst, std::abs(diff) / std::max(m.arrived_mb[l], 1.0));
  }
  return worst;
}

FeasibilityStats check_feasibility(const SystemConfig& cfg, const std::vector<Algorithm>& algs) {
  FeasibilityStats s;
  for (Algorithm a : algs) {
    ++s.runs;
    try {
      const RunMetrics m = run(cfg, a);
      const double c = conservation_error(m);
      s.worst_conservation = std::max(s.worst_conservation, c);
      s.max_cell_power = std::max(s.max_cell_power, m.max_cell_power);
      const long long slots = static_cast<long long>(cfg.num_frames) * cfg.frame_len;
      std::string why;
      if (c > 1e-9) why = "conservation error " + fmt(c);
      if (m.max_cell_power > cfg.p_max_cell + 1e-9) why = "cell power " + fmt(m.max_cell_power);
      if (m.slots_validated != slots) why = "not every slot validated";
      if (!why.empty()) {
        ++s.failures;
        if (s.detail.empty()) s.detail = std::string(to_string(a)) + ": " + why;
      }
    } catch (const Error& e) {
      ++s.failures;
      if (s.detail.empty()) s.detail = std::string(to_string(a)) + ": " + e.what();
    }
  }
  return s;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"bianchi", "stage2", "duality",
                                              "ensra",   "gp",     "feasibility"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SystemConfig& cfg) {
  SuiteResult r;
  r.name = name;
  const std::uint64_t seed = cfg.seed;
  if (name == "bianchi") {
    const auto b = compare_bianchi(cfg, std::max(10, cfg.num_users));
    r.passed = b.phi1_error == 0.0 && b.worst_residual < 1e-10 && b.worst_phi_gap < 1e-9 &&
               b.worst_rate_rel < 1e-12 && b.worst_power_rel < 1e-12;
    r.detail = "residual " + fmt(b.worst_residual) + ", phi gap " + fmt(b.worst_phi_gap) +
               ", rate rel " + fmt(b.worst_rate_rel) + ", power rel " + fmt(b.worst_power_rel);
  } else if (name == "stage2") {
    const auto s = compare_stage2(cfg, 30, seed, 0.01);
    r.passed = s.failures == 0;
    r.detail = std::to_string(s.failures) + "/" + std::to_string(s.instances) +
               " failed, worst shortfall " + fmt(s.worst_shortfall) + ", worst excess " +
               fmt(s.worst_excess);
  } else if (name == "duality") {
    const auto s = compare_duality(cfg, 30, seed, 1e-6);
    r.passed = s.failures == 0;
    r.detail = std::to_string(s.failures) + "/" + std::to_string(s.instances) +
               " failed, dual rel " + fmt(s.worst_dual_rel) + ", mu rel " + fmt(s.worst_mu_rel) +
               ", weak duality " + fmt(s.worst_weak);
  } else if (name == "ensra") {
    const auto s = compare_ensra(cfg, 5, seed, 0.01);
    r.passed = s.failures == 0;
    r.detail = std::to_string(s.failures) + "/" + std::to_string(s.instances) +
               " failed, worst shortfall " + fmt(s.worst_shortfall);
  } else if (name == "gp") {
    const auto g = check_gp_monotone(cfg, 10, seed);
    const auto h = check_gp_heavy(cfg, 3, seed);
    SystemConfig small = cfg;
    small.num_frames = std::min(cfg.num_frames, 20);
    const auto one = check_gp_single_frame(small);
    r.passed = g.monotone_violations == 0 && h.not_heavy == 0 && h.step_mismatches == 0 &&
               h.worst_reduction < 1e-9 && one.identical;
    r.detail = std::to_string(g.monotone_violations) + " monotonicity violations, " +
               std::to_string(h.step_mismatches) + " heavy-traffic mismatches, W=1: " + one.detail;
  } else if (name == "feasibility") {
    SystemConfig small = cfg;
    small.num_frames = std::min(cfg.num_frames, 20);
    const auto f = check_feasibility(small, {Algorithm::kEnsra, Algorithm::kREnsra,
                                             Algorithm::kGpEnsra, Algorithm::kHeuristic});
    r.passed = f.failures == 0;
    r.detail = f.failures ? f.detail
                          : std::to_string(f.runs) + " runs, conservation " +
                                fmt(f.worst_conservation) + ", max cell power " +
                                fmt(f.max_cell_power) + " W";
  } else {
    throw ConfigError("unknown suite '" + name +
                      "' (expected bianchi, stage2, duality, ensra, gp or feasibility)");
  }
  return r;
}

}  // namespace ensra::check
