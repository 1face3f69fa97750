#include "ensra/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ensra/cellular.hpp"
#include "ensra/error.hpp"

namespace ensra {

Scenario Scenario::make(const SystemConfig& cfg) {
  cfg.validate();
  return make(cfg, cfg.wifi_cells.empty() ? make_topology(cfg, cfg.seed)
                                          : make_topology(cfg, cfg.wifi_cells));
}

Scenario Scenario::make(const SystemConfig& cfg, const Topology& topo) {
  cfg.validate();
  return Scenario{cfg, topo, WifiModel(cfg)};
}

std::vector<std::vector<int>> selection_options(std::span<const int> locations,
                                                const Topology& topo) {
  std::vector<std::vector<int>> opts;
  opts.reserve(locations.size());
  for (int s : locations) {
    std::vector<int> o{0};
    const auto& cov = topo.wifi_coverage.at(static_cast<std::size_t>(s));
    o.insert(o.end(), cov.begin(), cov.end());
    opts.push_back(std::move(o));
  }
  return opts;
}

UserMask cellular_mask(std::span<const int> alpha) {
  UserMask m = 0;
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    if (alpha[l] == 0) m |= UserMask{1} << l;
  }
  return m;
}

FrameCandidates enumerate_frame(std::span<const double> weights, const EnvTrace& env, int frame,
                                double V, const Scenario& sc, KernelMode mode) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int T = env.frame_len;
  if (static_cast<int>(weights.size()) != L) throw ShapeError("one weight per user expected");

  const auto opts = selection_options(env.locations(frame), sc.topo);
  std::size_t total = 1;
  for (const auto& o : opts) {
    if (total > cfg.solver.selection_cap / o.size()) {
      throw ScaleError("combinatorial cap exceeded: more than " +
                       std::to_string(cfg.solver.selection_cap) +
                       " joint network selections; reduce num_users or num_wifi");
    }
    total *= o.size();
  }

  FrameCandidates c;
  c.weights.assign(weights.begin(), weights.end());
  c.V = V;
  c.alphas.reserve(total);
  std::map<UserMask, std::size_t> mask_pos;
  std::vector<UserMask> masks;
  std::vector<std::size_t> idx(static_cast<std::size_t>(L), 0);
  std::vector<int> alpha(static_cast<std::size_t>(L));
  for (std::size_t k = 0; k < total; ++k) {
    for (int l = 0; l < L; ++l) alpha[l] = opts[l][idx[l]];
    const UserMask m = cellular_mask(alpha);
    auto [it, inserted] = mask_pos.emplace(m, masks.size());
    if (inserted) masks.push_back(m);
    c.alphas.push_back(alpha);
    c.mask_index.push_back(it->second);
    for (int l = L - 1; l >= 0; --l) {
      if (++idx[l] < opts[l].size()) break;
      idx[l] = 0;
    }
  }

  const Stage2Params prm = Stage2Params::from(cfg, V);
  c.table = stage2_table(mode, masks, weights, env, frame * T, T, cfg, prm);

  c.objective.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    const auto& a = c.alphas[k];
    const auto load = WifiModel::loads(a, cfg.num_wifi);
    double wifi_power = 0.0;
    for (int n = 1; n <= cfg.num_wifi; ++n) wifi_power += sc.wifi.power(load[n]);
    double wifi_gain = 0.0;
    for (int l = 0; l < L; ++l) {
      if (a[l] != 0) wifi_gain += weights[l] * sc.wifi.total_rate(load[a[l]]) / load[a[l]];
    }
    c.objective[k] = T * (V * wifi_power - wifi_gain) - c.table.frame_objective[c.mask_index[k]];
  }
  return c;
}

std::size_t best_candidate(const FrameCandidates& cands) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < cands.objective.size(); ++k) {
    if (cands.objective[k] < cands.objective[best]) best = k;
  }
  return best;
}

FrameDecision materialize(const FrameCandidates& cands, std::size_t which, const Scenario& sc) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int T = cands.table.num_slots;
  FrameDecision d;
  d.alpha = cands.alphas.at(which);
  d.objective = cands.objective[which];
  d.candidates = cands.alphas.size();
  d.slots.reserve(static_cast<std::size_t>(T));
  d.rates.assign(static_cast<std::size_t>(T) * L, 0.0);
  d.power.assign(static_cast<std::size_t>(T), 0.0);
  const double wifi_power = sc.wifi.total_power(d.alpha, cfg.num_wifi);
  std::vector<double> wifi_rate(static_cast<std::size_t>(L), 0.0);
  for (int l = 0; l < L; ++l) {
    if (d.alpha[l] != 0) wifi_rate[l] = sc.wifi.user_rate(d.alpha, l);
  }
  const std::size_t mi = cands.mask_index[which];
  for (int tau = 0; tau < T; ++tau) {
    const SlotSolution& s = cands.table.at(mi, tau);
    d.slots.push_back(s.alloc);
    for (int l = 0; l < L; ++l) {
      d.rates[static_cast<std::size_t>(tau) * L + l] = d.alpha[l] != 0 ? wifi_rate[l] : s.user_rate[l];
    }
    d.power[tau] = cfg.kappa * s.cell_power + wifi_power;
  }
  return d;
}

FrameDecision ensra_frame_weighted(std::span<const double> weights, const EnvTrace& env, int frame,
                                   double V, const Scenario& sc, KernelMode mode) {
  const FrameCandidates c = enumerate_frame(weights, env, frame, V, sc, mode);
  return materialize(c, best_candidate(c), sc);
}

FrameDecision ensra_frame(std::span<const double> q, const EnvTrace& env, int frame, double V,
                          const Scenario& sc, KernelMode mode) {
  for (double v : q) {
    if (!(v >= 0)) throw DomainError("queue backlog must be non-negative");
  }
  return ensra_frame_weighted(q, env, frame, V, sc, mode);
}

ChannelSampler rayleigh_sampler(std::span<const int> locations, const Scenario& sc) {
  std::vector<double> dist;
  for (int s : locations) dist.push_back(sc.topo.distance_m.at(static_cast<std::size_t>(s)));
  const SystemConfig cfg = sc.cfg;
  return [dist, cfg](Rng& rng, std::span<double> g) {
    const int M = cfg.num_subchannels;
    for (std::size_t l = 0; l < dist.size(); ++l) {
      for (int m = 0; m < M; ++m) g[l * M + m] = sample_channel(dist[l], rng, cfg);
    }
  };
}

FrameDecision r_ensra_frame(std::span<const double> q, const EnvTrace& env, int frame, double V,
                            const Scenario& sc, Rng& rng, const ChannelSampler& sampler,
                            KernelMode mode) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  const int K = cfg.solver.mc_samples;

  // Draws become the slots of a one-frame synthetic trace so the candidate
  // search can reuse the ENSRA machinery unchanged.
  EnvTrace draws(L, M, K, 1);
  const auto loc = env.locations(frame);
  std::copy(loc.begin(), loc.end(), draws.location.begin());
  for (int k = 0; k < K; ++k) {
    sampler(rng, std::span<double>(draws.gain.data() + static_cast<std::size_t>(k) * L * M,
                                   static_cast<std::size_t>(L) * M));
  }
  const FrameCandidates c = enumerate_frame(q, draws, 0, V, sc, mode);
  const std::size_t pick = best_candidate(c);

  FrameDecision d;
  d.alpha = c.alphas[pick];
  d.candidates = c.alphas.size();
  const UserMask mask = cellular_mask(d.alpha);
  const Stage2Params prm = Stage2Params::from(cfg, V);
  const int T = env.frame_len;
  for (int tau = 0; tau < T; ++tau) {
    d.slots.push_back(solve_slot(mask, q, env.gains(frame * T + tau), cfg, prm).alloc);
  }
  evaluate_decision(d, env, frame * T, sc);
  d.objective = frame_objective(d, q, V);
  return d;
}

FrameDecision heuristic_frame(std::span<const double> q, const EnvTrace& env, int frame,
                              const Scenario& sc, double macro_radius_m) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  const int T = env.frame_len;
  const auto loc = env.locations(frame);

  FrameDecision d;
  d.alpha.assign(static_cast<std::size_t>(L), 0);
  d.candidates = 1;
  std::vector<int> load(static_cast<std::size_t>(cfg.num_wifi) + 1, 0);
  for (int l = 0; l < L; ++l) {
    const auto& cov = sc.topo.wifi_coverage[loc[l]];
    if (cov.empty() || sc.topo.distance_m[loc[l]] < macro_radius_m) continue;
    int best = cov.front();
    for (int n : cov) {
      if (load[n] < load[best]) best = n;
    }
    d.alpha[l] = best;
    ++load[best];
  }

  Stage2Params prm = Stage2Params::from(cfg, 0.0);
  const double w = cfg.subchannel_bw();
  const double even = cfg.p_max_cell / M;
  std::vector<double> cw;
  std::vector<double> cg;
  std::vector<int> users;
  for (int l = 0; l < L; ++l) {
    if (d.alpha[l] == 0) users.push_back(l);
  }
  for (int tau = 0; tau < T; ++tau) {
    const auto g = env.gains(frame * T + tau);
    SlotAllocation a(M);
    if (!users.empty()) {
      const int K = static_cast<int>(users.size());
      cw.assign(static_cast<std::size_t>(K), 0.0);
      cg.assign(static_cast<std::size_t>(K) * M, 0.0);
      for (int k = 0; k < K; ++k) {
        cw[k] = q[users[k]];
        std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(users[k]) * M, M, cg.begin() + k * M);
      }
      const Stage2Problem pb{K, M, cw, cg};
      std::vector<int> f(static_cast<std::size_t>(M), 0);
      for (int m = 0; m < M; ++m) {
        double bv = -1.0;
        for (int k = 0; k < K; ++k) {
          const double h = pb.gain(k, m);
          const double v = cw[k] * std::log2(1.0 + even * h * h / (cfg.noise_psd * w));
          if (v > bv) {
            bv = v;
            f[m] = k;
          }
        }
      }
      const auto p = waterfill_given_assignment(f, pb, prm);
      for (int m = 0; m < M; ++m) {
        a.owner[m] = users[f[m]];
        a.power[m] = p[m];
      }
    }
    d.slots.push_back(std::move(a));
  }
  evaluate_decision(d, env, frame * T, sc);
  d.objective = frame_objective(d, q, cfg.V);
  return d;
}

void evaluate_decision(FrameDecision& d, const EnvTrace& env, int first_slot, const Scenario& sc) {
  const SystemConfig& cfg = sc.cfg;
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  const int T = d.num_slots();
  d.rates.assign(static_cast<std::size_t>(T) * L, 0.0);
  d.power.assign(static_cast<std::size_t>(T), 0.0);
  const double wifi_power = sc.wifi.total_power(d.alpha, cfg.num_wifi);
  std::vector<double> wifi_rate(static_cast<std::size_t>(L), 0.0);
  for (int l = 0; l < L; ++l) {
    if (d.alpha[l] != 0) wifi_rate[l] = sc.wifi.user_rate(d.alpha, l);
  }
  for (int tau = 0; tau < T; ++tau) {
    const int t = first_slot + tau;
    double* r = d.rates.data() + static_cast<std::size_t>(tau) * L;
    for (int l = 0; l < L; ++l) r[l] = wifi_rate[l];
    const SlotAllocation& a = d.slots[tau];
    for (int m = 0; m < M; ++m) {
      const int u = a.owner[m];
      if (u >= 0 && a.power[m] > 0) r[u] += subchannel_rate(a.power[m], env.gain_at(t, u, m), cfg);
    }
    d.power[tau] = cfg.kappa * a.total_power() + wifi_power;
  }
}

double frame_objective(const FrameDecision& d, std::span<const double> weights, double V) {
  const std::size_t L = d.alpha.size();
  double v = 0.0;
  for (int tau = 0; tau < d.num_slots(); ++tau) {
    v += V * d.power[tau];
    const auto r = d.slot_rates(tau);
    for (std::size_t l = 0; l < L; ++l) v -= weights[l] * r[l];
  }
  return v;
}

}  // namespace ensra
