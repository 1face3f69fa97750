#include "ensra/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <spdlog/spdlog.h>

#include "ensra/error.hpp"
#include "ensra/window.hpp"

namespace ensra {

namespace {

// Planned selections can be invalid at the true location when the forecast
// location was wrong. Such users fall back to the macrocell and the frame's
// allocations are re-solved on the true channels.
bool repair_selection(FrameDecision& d, const EnvTrace& trace, int frame,
                      std::span<const double> q, const Scenario& sc) {
  const auto loc = trace.locations(frame);
  bool changed = false;
  for (std::size_t l = 0; l < d.alpha.size(); ++l) {
    if (d.alpha[l] != 0 && !sc.topo.covers(loc[l], d.alpha[l])) {
      d.alpha[l] = 0;
      changed = true;
    }
  }
  if (!changed) return false;
  const Stage2Params prm = Stage2Params::from(sc.cfg, sc.cfg.V);
  const UserMask mask = cellular_mask(d.alpha);
  const int T = trace.frame_len;
  for (int tau = 0; tau < T; ++tau) {
    d.slots[tau] = solve_slot(mask, q, trace.gains(frame * T + tau), sc.cfg, prm).alloc;
  }
  return true;
}

}  // namespace

RunMetrics run(const SystemConfig& cfg, Algorithm algorithm, const RunOptions& opts) {
  const Scenario sc = Scenario::make(cfg);
  const EnvTrace trace = generate_trace(cfg, sc.topo);
  return run(sc, trace, algorithm, opts);
}

RunMetrics run(const Scenario& sc, const EnvTrace& trace, Algorithm algorithm,
               const RunOptions& opts) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int T = cfg.frame_len;
  const int K = trace.num_frames;
  if (trace.num_users != L || trace.num_channels != cfg.num_subchannels || trace.frame_len != T) {
    throw ShapeError("trace dimensions do not match the configuration");
  }

  RunMetrics m;
  m.frames = K;
  m.warmup_frames = static_cast<int>(std::floor(cfg.warmup_fraction * K));
  m.arrived_mb.assign(static_cast<std::size_t>(L), 0.0);
  m.served_mb.assign(static_cast<std::size_t>(L), 0.0);

  std::vector<double> q(static_cast<std::size_t>(L), 0.0);
  Rng mc_rng = make_rng(cfg.seed, Stream::kMonteCarlo);
  Rng fc_rng = make_rng(cfg.seed, Stream::kForecast);
  WindowDecision plan;
  int plan_start = 0;
  int windows = 0;
  long long gp_iters = 0;

  double sum_power = 0.0;
  double sum_q_slot = 0.0;
  double sum_q_frame = 0.0;
  double served_total = 0.0;
  double served_wifi = 0.0;
  long long measured_slots = 0;
  long long measured_frames = 0;

  for (int k = 0; k < K; ++k) {
    FrameDecision d;
    try {
      switch (algorithm) {
        case Algorithm::kEnsra:
          d = ensra_frame(q, trace, k, cfg.V, sc, opts.mode);
          break;
        case Algorithm::kREnsra:
          d = r_ensra_frame(q, trace, k, cfg.V, sc, mc_rng, rayleigh_sampler(trace.locations(k), sc),
                            opts.mode);
          break;
        case Algorithm::kHeuristic:
          d = heuristic_frame(q, trace, k, sc);
          break;
        case Algorithm::kGpEnsra:
        case Algorithm::kPEnsraExact: {
          if (k % cfg.window == 0) {
            WindowForecast fc = forecast_window(trace, k, cfg.window, cfg.prediction_error,
                                                sc.topo, cfg, fc_rng);
            m.forecast_items += fc.future_items;
            m.forecast_corrupted += fc.corrupted;
            plan = algorithm == Algorithm::kGpEnsra
                       ? gp_ensra_window(q, fc.trace, cfg.V, cfg.theta, sc, opts.mode)
                       : p_ensra_exact(q, fc.trace, cfg.V, cfg.theta, sc, opts.mode);
            plan_start = k;
            ++windows;
            gp_iters += plan.iterations;
            m.approximate_steps += plan.approximate_steps;
          }
          d = plan.frames.at(static_cast<std::size_t>(k - plan_start));
          if (repair_selection(d, trace, k, q, sc)) ++m.infeasible_fallbacks;
          evaluate_decision(d, trace, k * T, sc);
          break;
        }
      }
    } catch (const Error& e) {
      throw Error("frame " + std::to_string(k) + ": " + e.what());
    }

    const bool measured = k >= m.warmup_frames;
    const auto loc = trace.locations(k);
    FrameRecord rec;
    if (opts.record_series) {
      rec.frame = k;
      rec.queue = q;
      rec.alpha = d.alpha;
    }
    if (measured) {
      for (double v : q) sum_q_frame += v;
      ++measured_frames;
    }
    double frame_power = 0.0;
    for (int tau = 0; tau < T; ++tau) {
      const int t = k * T + tau;
      if (opts.validate) {
        validate_decision(d.alpha, d.slots[tau], loc, sc.topo, cfg);
        ++m.slots_validated;
      }
      const double power = d.power[tau];
      const double cell = d.slots[tau].total_power();
      m.max_cell_power = std::max(m.max_cell_power, cell);
      m.max_total_power = std::max(m.max_total_power, power);
      frame_power += power;
      const auto r = d.slot_rates(tau);
      const auto a = trace.arrivals(t);
      if (measured) {
        sum_power += power;
        for (double v : q) sum_q_slot += v;
        ++measured_slots;
      }
      for (int l = 0; l < L; ++l) {
        m.r_max_realized = std::max(m.r_max_realized, r[l]);
        const double served = std::min(q[l], r[l] * cfg.slot_dt);
        const double arrived = a[l] * cfg.slot_dt;
        q[l] = (q[l] - served) + arrived;
        m.served_mb[l] += served;
        m.arrived_mb[l] += arrived;
        if (measured) {
          served_total += served;
          if (d.alpha[l] != 0) served_wifi += served;
        }
      }
    }
    if (opts.record_series) {
      rec.avg_power = frame_power / T;
      m.series.push_back(std::move(rec));
    }
    spdlog::debug("frame {} alpha-mask {:#x} avg power {:.4f} W", k, cellular_mask(d.alpha), frame_power / T);
  }

  m.final_queue_mb = q;
  if (measured_slots > 0) {
    m.avg_power = sum_power / measured_slots;
    m.avg_queue_slot = sum_q_slot / (static_cast<double>(measured_slots) * L);
  }
  if (measured_frames > 0) m.avg_queue_frame = sum_q_frame / (static_cast<double>(measured_frames) * L);
  m.avg_delay = m.avg_queue_slot / cfg.mean_arrival;
  m.offload_fraction = served_total > 0 ? served_wifi / served_total : 0.0;
  if (windows > 0) m.avg_gp_iterations = static_cast<double>(gp_iters) / windows;
  return m;
}

BoundReport bound_report(const RunMetrics& m, const SystemConfig& cfg, double V) {
  const WifiModel wifi(cfg);
  const BoundConstants b = bound_constants(cfg, m.r_max_realized, wifi);
  BoundReport r;
  r.b2 = b.b2;
  r.p_max = b.p_max_total;
  r.avg_power = m.avg_power;
  r.avg_queue_frame_total = cfg.num_users * m.avg_queue_frame;
  r.avg_queue_slot_total = cfg.num_users * m.avg_queue_slot;
  r.power_gap = V > 0 ? b.b2 / V : std::numeric_limits<double>::infinity();
  r.queue_correction = 0.5 * (cfg.frame_len - 1) * cfg.num_users * cfg.a_max() * cfg.slot_dt;
  r.queue_relation_holds =
      r.avg_queue_slot_total - r.avg_queue_frame_total <= r.queue_correction * (1 + 1e-12);
  return r;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "V") return SweepAxis::kV;
  if (name == "theta") return SweepAxis::kTheta;
  if (name == "W" || name == "window") return SweepAxis::kWindow;
  if (name == "mean_arrival") return SweepAxis::kMeanArrival;
  if (name == "error_rate" || name == "prediction_error") return SweepAxis::kErrorRate;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected V, theta, W, mean_arrival or error_rate)");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kV: return "V";
    case SweepAxis::kTheta: return "theta";
    case SweepAxis::kWindow: return "W";
    case SweepAxis::kMeanArrival: return "mean_arrival";
    case SweepAxis::kErrorRate: return "error_rate";
  }
  return "unknown";
}

void apply_axis(SystemConfig& cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kV: cfg.V = value; break;
    case SweepAxis::kTheta: cfg.theta = value; break;
    case SweepAxis::kWindow:
      if (value != std::floor(value)) throw ConfigError("W must be an integer");
      cfg.window = static_cast<int>(value);
      break;
    case SweepAxis::kMeanArrival: cfg.mean_arrival = value; break;
    case SweepAxis::kErrorRate: cfg.prediction_error = value; break;
  }
}

RunRow make_row(int run_id, const SystemConfig& cfg, Algorithm algorithm, const RunMetrics& m) {
  RunRow r;
  r.run_id = run_id;
  r.algorithm = std::string(to_string(algorithm));
  r.V = cfg.V;
  r.theta = cfg.theta;
  r.W = cfg.window;
  r.error_rate = cfg.prediction_error;
  r.mean_arrival = cfg.mean_arrival;
  r.seed = cfg.seed;
  r.avg_power = m.avg_power;
  r.avg_queue = m.avg_queue_slot;
  r.avg_delay = m.avg_delay;
  r.offload_pct = 100.0 * m.offload_fraction;
  r.frames = m.frames;
  return r;
}

std::vector<RunRow> sweep(const SystemConfig& base, Algorithm algorithm, SweepAxis axis,
                          const std::vector<double>& values, int replications,
                          const RunOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (replications < 1) throw ConfigError("replications must be at least 1");
  std::vector<SystemConfig> cfgs;
  for (double v : values) {
    for (int r = 0; r < replications; ++r) {
      SystemConfig c = base;
      apply_axis(c, axis, v);
      c.seed = base.seed + static_cast<std::uint64_t>(r);
      c.validate();
      cfgs.push_back(c);
    }
  }
  const int n = static_cast<int>(cfgs.size());
  std::vector<RunRow> rows(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  // Runs are independent; rows are written by index so the output order does
  // not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      rows[i] = make_row(i, cfgs[i], algorithm, run(cfgs[i], algorithm, opts));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace ensra
