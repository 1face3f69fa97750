// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any
// fails. Tolerances and sweep grids are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ensra/sim.hpp"
#include "oracles/oracles.hpp"
#include "oracles/validate.hpp"

namespace {

using namespace ensra;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 2024;

constexpr int kStage2Instances = 100;
constexpr double kStage2RelTol = 0.01;
constexpr double kStage2Seconds = 120.0;

constexpr int kEnsraInstances = 20;
constexpr double kEnsraRelTol = 0.01;
constexpr double kEnsraSeconds = 300.0;

constexpr double kPhiResidual = 1e-10;
constexpr double kFormulaRelTol = 1e-12;
constexpr int kMaxRho = 10;

constexpr int kGpWindows = 50;
constexpr int kHeavyInstances = 10;
constexpr double kReductionTol = 1e-9;
constexpr int kSingleFrameFrames = 100;

constexpr int kExactWindows = 20;

const std::vector<double> kVGrid{0.1, 0.25, 0.5, 1.0, 2.0};
constexpr int kReps = 3;
constexpr double kSpearmanPower = -0.8;
constexpr double kSpearmanDelay = 0.8;
constexpr int kMaxOffloadInversions = 1;
constexpr double kSweepSeconds = 1800.0;

const std::vector<double> kArrivalGrid{1.0, 2.0, 3.0};

// Large-delay operating point for the predictive comparison and the other
// points reported alongside it.
constexpr double kSmallV = 0.1;
constexpr double kLargeV = 512.0;
const std::vector<double> kSensitivityV{64.0, 128.0, 256.0, 512.0, 1024.0};
constexpr int kWindow = 5;
constexpr double kNoisyForecast = 0.2;
constexpr double kMinDelayGain = 0.05;
constexpr double kPowerMatch = 0.03;

constexpr double kConservationTol = 1e-9;
constexpr double kBudgetSlack = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Every simulated run is kept for the feasibility and queue-relation checks.
struct Ledger {
  struct Entry {
    SystemConfig cfg;
    Algorithm alg;
    RunMetrics m;
  };
  std::vector<Entry> runs;

  const RunMetrics& add(const SystemConfig& cfg, Algorithm alg) {
    runs.push_back({cfg, alg, run(cfg, alg)});
    return runs.back().m;
  }
};

struct Point {
  double power = 0.0, delay = 0.0, offload = 0.0;
};

Point mean_over_seeds(Ledger& ledger, SystemConfig cfg, Algorithm alg) {
  Point p;
  const std::uint64_t base = cfg.seed;
  for (int r = 0; r < kReps; ++r) {
    cfg.seed = base + r;
    const RunMetrics& m = ledger.add(cfg, alg);
    p.power += m.avg_power / kReps;
    p.delay += m.avg_delay / kReps;
    p.offload += m.offload_fraction / kReps;
  }
  return p;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto s = check::compare_stage2(SystemConfig{}, kStage2Instances, kSeed, kStage2RelTol);
  const double secs = seconds_since(t0);
  return {s.failures == 0 && secs < kStage2Seconds,
          std::to_string(s.instances) + " instances, " + std::to_string(s.failures) +
              " outside tolerance, worst shortfall vs grid " + f("%.2e", s.worst_shortfall) +
              ", worst gap to continuous optimum " + f("%.2e", s.worst_gap) + ", " +
              f("%.1f", secs) + " s"};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const auto s = check::compare_ensra(SystemConfig{}, kEnsraInstances, kSeed, kEnsraRelTol);
  const double secs = seconds_since(t0);
  return {s.failures == 0 && secs < kEnsraSeconds,
          std::to_string(s.instances) + " frames, " + std::to_string(s.failures) +
              " outside tolerance, worst shortfall " + f("%.2e", s.worst_shortfall) + ", " +
              f("%.1f", secs) + " s"};
}

Outcome criterion3() {
  const auto b = check::compare_bianchi(SystemConfig{}, kMaxRho);
  return {b.phi1_error == 0.0 && b.worst_residual < kPhiResidual &&
              b.worst_rate_rel <= kFormulaRelTol && b.worst_power_rel <= kFormulaRelTol,
          "phi(1) error " + f("%.1e", b.phi1_error) + ", residual " + f("%.1e", b.worst_residual) +
              ", rate rel " + f("%.1e", b.worst_rate_rel) + ", power rel " +
              f("%.1e", b.worst_power_rel) + ", phi vs fixed point " + f("%.1e", b.worst_phi_gap)};
}

Outcome criterion4() {
  const SystemConfig base;
  const auto g = check::check_gp_monotone(base, kGpWindows, kSeed);
  const auto h = check::check_gp_heavy(base, kHeavyInstances, kSeed);
  SystemConfig one = base;
  one.num_frames = kSingleFrameFrames;
  const auto w1 = check::check_gp_single_frame(one);
  const bool pass = g.monotone_violations == 0 && g.hit_cap == 0 && h.not_heavy == 0 &&
                    h.step_mismatches == 0 && h.worst_reduction < kReductionTol && w1.identical;
  return {pass, std::to_string(g.windows) + " windows, " + std::to_string(g.monotone_violations) +
                    " non-monotone, max " + std::to_string(g.max_iterations) + " iterations (cap " +
                    std::to_string(base.solver.gp_max_iterations) + "); heavy traffic: " +
                    std::to_string(h.step_mismatches) + "/" + std::to_string(h.instances) +
                    " step mismatches, reduction spread " + f("%.1e", h.worst_reduction) +
                    "; W=1: " + w1.detail};
}

Outcome criterion5() {
  const auto s = check::compare_exact_greedy(SystemConfig{}, kExactWindows, kSeed);
  return {s.violations == 0,
          std::to_string(s.windows) + " windows, " + std::to_string(s.violations) +
              " with exact above greedy (worst " + f("%.2e", s.worst_excess) + "), median gap " +
              f("%.2e", s.median_gap) + ", max gap " + f("%.2e", s.max_gap)};
}

int inversions(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += v[i] < v[i - 1];
  return n;
}

Outcome criterion6(Ledger& ledger) {
  const auto t0 = Clock::now();
  SystemConfig cfg;
  cfg.seed = kSeed;
  std::vector<double> vs, power, delay, offload;
  std::vector<double> pooled_v, pooled_power, pooled_delay;
  for (double V : kVGrid) {
    cfg.V = V;
    const std::size_t first = ledger.runs.size();
    const Point p = mean_over_seeds(ledger, cfg, Algorithm::kEnsra);
    for (std::size_t i = first; i < ledger.runs.size(); ++i) {
      pooled_v.push_back(V);
      pooled_power.push_back(ledger.runs[i].m.avg_power);
      pooled_delay.push_back(ledger.runs[i].m.avg_delay);
    }
    vs.push_back(V);
    power.push_back(p.power);
    delay.push_back(p.delay);
    offload.push_back(p.offload);
  }
  const double secs = seconds_since(t0);
  const double rp = oracle::spearman(vs, power);
  const double rd = oracle::spearman(vs, delay);
  const int inv = inversions(offload);
  std::string off;
  for (double o : offload) off += (off.empty() ? "" : " ") + f("%.3f", o);
  return {rp <= kSpearmanPower && rd >= kSpearmanDelay && inv <= kMaxOffloadInversions &&
              secs < kSweepSeconds,
          "spearman(V, power) " + f("%.2f", rp) + ", spearman(V, delay) " + f("%.2f", rd) +
              " on seed means (pooled " + f("%.2f", oracle::spearman(pooled_v, pooled_power)) +
              ", " + f("%.2f", oracle::spearman(pooled_v, pooled_delay)) + "), offload " + off +
              " with " + std::to_string(inv) + " inversions, " + f("%.1f", secs) + " s"};
}

Outcome criterion7(Ledger& ledger) {
  SystemConfig cfg;
  cfg.seed = kSeed;
  std::vector<Point> pts;
  for (double a : kArrivalGrid) {
    cfg.mean_arrival = a;
    pts.push_back(mean_over_seeds(ledger, cfg, Algorithm::kEnsra));
  }
  bool pass = true;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    pass = pass && pts[i].power > pts[i - 1].power && pts[i].delay > pts[i - 1].delay &&
           pts[i].offload < pts[i - 1].offload;
  }
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d += (i ? "; " : "") + f("%g Mbps: ", kArrivalGrid[i]) + f("%.2f W, ", pts[i].power) +
         f("%.3f s, ", pts[i].delay) + f("offload %.3f", pts[i].offload);
  }
  return {pass, d};
}

struct Predictive {
  Point ensra, gp, gp_noisy;
  double gain() const { return (ensra.delay - gp.delay) / ensra.delay; }
  double power_gap() const { return std::abs(gp.power - ensra.power) / ensra.power; }
};

Predictive predictive_at(Ledger& ledger, double V) {
  SystemConfig cfg;
  cfg.seed = kSeed;
  cfg.V = V;
  Predictive p;
  p.ensra = mean_over_seeds(ledger, cfg, Algorithm::kEnsra);
  cfg.window = kWindow;
  p.gp = mean_over_seeds(ledger, cfg, Algorithm::kGpEnsra);
  cfg.prediction_error = kNoisyForecast;
  p.gp_noisy = mean_over_seeds(ledger, cfg, Algorithm::kGpEnsra);
  return p;
}

Outcome criterion8(Ledger& ledger) {
  SystemConfig small;
  small.seed = kSeed;
  small.V = kSmallV;
  const double small_delay = mean_over_seeds(ledger, small, Algorithm::kEnsra).delay;

  Predictive at_large;
  for (double V : kSensitivityV) {
    const Predictive p = predictive_at(ledger, V);
    std::printf("  note: V=%g ensra %.4f W %.3f s, gp(W=%d) %.4f W %.3f s (delay gain %+.1f%%), "
                "gp(e=%.1f) %.4f W %.3f s\n",
                V, p.ensra.power, p.ensra.delay, kWindow, p.gp.power, p.gp.delay, 100 * p.gain(),
                kNoisyForecast, p.gp_noisy.power, p.gp_noisy.delay);
    if (V == kLargeV) at_large = p;
  }
  const Predictive& p = at_large;
  const bool regime = p.ensra.delay >= 2 * small_delay;
  const double degradation = p.gp_noisy.delay - p.gp.delay;
  const double improvement = p.ensra.delay - p.gp.delay;
  const bool pass = regime && p.power_gap() <= kPowerMatch && p.gain() >= kMinDelayGain &&
                    degradation <= improvement;
  return {pass, f("V=%g: ", kLargeV) + "ensra delay " + f("%.3f s", p.ensra.delay) +
                    f(" (%.1fx small-V), ", p.ensra.delay / small_delay) + "gp delay gain " +
                    f("%.1f%%", 100 * p.gain()) + f(" at power gap %.2f%%, ", 100 * p.power_gap()) +
                    "e=0.2 degradation " + f("%.3f s", degradation) + " vs improvement " +
                    f("%.3f s", improvement)};
}

Outcome criterion9(Ledger& ledger) {
  SystemConfig cfg;
  cfg.seed = kSeed;
  ledger.add(cfg, Algorithm::kREnsra);
  ledger.add(cfg, Algorithm::kHeuristic);
  double worst = 0.0, max_power = 0.0;
  int bad = 0;
  for (const auto& e : ledger.runs) {
    const double c = check::conservation_error(e.m);
    const long long slots = static_cast<long long>(e.cfg.num_frames) * e.cfg.frame_len;
    worst = std::max(worst, c);
    max_power = std::max(max_power, e.m.max_cell_power);
    if (c > kConservationTol || e.m.slots_validated != slots ||
        e.m.max_cell_power > e.cfg.p_max_cell + kBudgetSlack) {
      ++bad;
    }
  }
  return {bad == 0, std::to_string(ledger.runs.size()) + " runs, " + std::to_string(bad) +
                        " failing, worst conservation error " + f("%.1e", worst) +
                        ", max cell power " + f("%.6f W", max_power)};
}

Outcome criterion10(const Ledger& ledger) {
  int n = 0, bad = 0;
  double worst_margin = INFINITY;
  for (const auto& e : ledger.runs) {
    if (e.alg != Algorithm::kEnsra) continue;
    const BoundReport r = bound_report(e.m, e.cfg, e.cfg.V);
    ++n;
    bad += !r.queue_relation_holds;
    worst_margin = std::min(worst_margin, r.queue_correction -
                                              (r.avg_queue_slot_total - r.avg_queue_frame_total));
  }
  return {n > 0 && bad == 0, std::to_string(n) + " ENSRA runs, " + std::to_string(bad) +
                                 " violations, smallest slack " + f("%.3f Mb", worst_margin)};
}

}  // namespace

int main() {
  Ledger ledger;
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, criterion5);
  report(6, [&] { return criterion6(ledger); });
  report(7, [&] { return criterion7(ledger); });
  report(8, [&] { return criterion8(ledger); });
  report(9, [&] { return criterion9(ledger); });
  report(10, [&] { return criterion10(ledger); });
  return failed ? 1 : 0;
}
