#include "oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ensra::oracle {

namespace {

using LD = long double;

LD tau_textbook(LD p, int W, int m) {
  const LD two_p = 2 * p;
  const LD num = 2 * (1 - two_p);
  const LD den = (1 - two_p) * (W + 1) + p * W * (1 - std::pow(two_p, static_cast<LD>(m)));
  return num / den;
}

struct Mix {
  LD idle, success, collide;
};

Mix mix(int rho, LD phi) {
  const LD ptr = 1 - std::pow(1 - phi, static_cast<LD>(rho));
  const LD ps = rho * phi * std::pow(1 - phi, static_cast<LD>(rho - 1)) / ptr;
  return {1 - ptr, ptr * ps, ptr * (1 - ps)};
}

LD slot_time(const Mix& s, const MacParams& mac) {
  return s.idle * mac.backoff_slot_us + s.success * mac.success_slot_us +
         s.collide * mac.collision_slot_us;
}

LD binom(int n, int k) {
  LD r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double kLn2 = 0.69314718055994530942;

}  // namespace

double phi_fixed_point(int rho, const DcfParams& dcf) {
  if (rho == 1) return 2.0 / (dcf.cw_min + 1.0);
  LD tau = 0.01L;
  LD beta = 0.5L;
  LD last = std::numeric_limits<LD>::infinity();
  for (int it = 0; it < 1000000; ++it) {
    const LD p = 1 - std::pow(1 - tau, static_cast<LD>(rho - 1));
    const LD f = tau_textbook(p, dcf.cw_min, dcf.backoff_stages);
    const LD r = std::abs(f - tau);
    if (r < 1e-16L) return static_cast<double>(tau);
    if (r > last) beta *= 0.5L;
    last = r;
    tau += beta * (f - tau);
  }
  throw std::runtime_error("oracle fixed point did not converge");
}

double wifi_rate_direct(int rho, double phi, const MacParams& mac) {
  if (rho <= 0) return 0.0;
  const Mix s = mix(rho, phi);
  return static_cast<double>(s.success * mac.payload_bits / slot_time(s, mac));
}

double wifi_power_direct(int rho, double phi, const MacParams& mac) {
  if (rho <= 0) return mac.backoff_energy_uj / mac.backoff_slot_us;
  const Mix s = mix(rho, phi);
  LD e = s.idle * mac.backoff_energy_uj + s.success * mac.success_energy_uj;
  for (int j = 2; j <= rho; ++j) {
    const LD pc = binom(rho, j) * std::pow(static_cast<LD>(phi), static_cast<LD>(j)) *
                  std::pow(1 - static_cast<LD>(phi), static_cast<LD>(rho - j));
    e += pc * (static_cast<LD>(mac.collision_energy_coeffs[0]) * rho +
               static_cast<LD>(mac.collision_energy_coeffs[1]) * j + mac.collision_energy_coeffs[2]);
  }
  return static_cast<double>(e / slot_time(s, mac));
}

double channel_rate(double power, double gain, const CellParams& c) {
  return c.bw * std::log2(1.0 + power * gain * gain / (c.noise_psd * c.bw));
}

namespace {

// Calls fn(owner) for every channel -> user map (-1 = unused), which is the
// same set as the valid 0/1 matrices.
template <class Fn>
void for_each_assignment(int users, int channels, Fn&& fn) {
  std::vector<int> owner(static_cast<std::size_t>(channels), -1);
  while (true) {
    fn(owner);
    int m = 0;
    while (m < channels) {
      if (++owner[m] < users) break;
      owner[m] = -1;
      ++m;
    }
    if (m == channels) return;
  }
}

double slot_value(const SlotInstance& s, std::span<const int> owner, std::span<const double> p) {
  double v = 0.0;
  for (int m = 0; m < s.channels; ++m) {
    if (owner[m] < 0) continue;
    v += s.weights[owner[m]] * channel_rate(p[m], s.gains[owner[m] * s.channels + m], s.cell) -
         s.cell.v_kappa * p[m];
  }
  return v;
}

double grid_best(const SlotInstance& s, std::span<const int> owner, int levels) {
  std::vector<int> used;
  for (int m = 0; m < s.channels; ++m) {
    if (owner[m] >= 0) used.push_back(m);
  }
  const double step = s.cell.p_max / (levels - 1);
  std::vector<int> k(used.size(), 0);
  std::vector<double> p(static_cast<std::size_t>(s.channels), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double sum = 0.0;
    for (std::size_t i = 0; i < used.size(); ++i) {
      p[used[i]] = k[i] * step;
      sum += p[used[i]];
    }
    if (sum <= s.cell.p_max * (1 + 1e-12)) best = std::max(best, slot_value(s, owner, p));
    std::size_t i = 0;
    while (i < used.size()) {
      if (++k[i] < levels) break;
      k[i] = 0;
      ++i;
    }
    if (i == used.size()) return best;
  }
}

std::vector<double> fill_at(const SlotInstance& s, std::span<const int> owner, double price) {
  std::vector<double> p(static_cast<std::size_t>(s.channels), 0.0);
  for (int m = 0; m < s.channels; ++m) {
    if (owner[m] < 0) continue;
    const double g = s.gains[owner[m] * s.channels + m];
    const double q = s.weights[owner[m]];
    if (q <= 0 || g <= 0) continue;
    p[m] = std::max(q * s.cell.bw / (price * kLn2) - s.cell.noise_psd * s.cell.bw / (g * g), 0.0);
  }
  return p;
}

double continuous_best(const SlotInstance& s, std::span<const int> owner) {
  auto total = [](const std::vector<double>& p) { return std::accumulate(p.begin(), p.end(), 0.0); };
  if (s.cell.v_kappa > 0) {
    auto p = fill_at(s, owner, s.cell.v_kappa);
    if (total(p) <= s.cell.p_max) return slot_value(s, owner, p);
  }
  double lo = std::max(s.cell.v_kappa, 1e-300);
  double hi = std::max(1.0, lo);
  while (total(fill_at(s, owner, hi)) > s.cell.p_max) hi *= 2;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (total(fill_at(s, owner, mid)) > s.cell.p_max ? lo : hi) = mid;
  }
  return slot_value(s, owner, fill_at(s, owner, hi));
}

}  // namespace

double brute_force_slot(const SlotInstance& s, int levels) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_assignment(s.users, s.channels, [&](const std::vector<int>& owner) {
    best = std::max(best, grid_best(s, owner, levels));
  });
  return best;
}

double continuous_slot(const SlotInstance& s) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_assignment(s.users, s.channels, [&](const std::vector<int>& owner) {
    best = std::max(best, continuous_best(s, owner));
  });
  return best;
}

double scalar_mu(double weight, double gain, double price, const CellParams& c) {
  if (weight <= 0 || gain <= 0) return 0.0;
  auto f = [&](double p) { return weight * channel_rate(p, gain, c) - price * p; };
  // The maximizer lies below the point where the marginal gain falls under
  // the price even at zero noise.
  const double hi = std::max(weight * c.bw / (price * kLn2), 1e-12);
  const int n = 2000;
  int best_k = 0;
  double best = f(0.0);
  for (int k = 1; k <= n; ++k) {
    const double v = f(hi * k / n);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  double a = hi * std::max(best_k - 1, 0) / n;
  double b = hi * std::min(best_k + 1, n) / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3;
    const double m2 = b - (b - a) / 3;
    (f(m1) < f(m2) ? a : b) = (f(m1) < f(m2) ? m1 : m2);
  }
  return std::max(best, f(0.5 * (a + b)));
}

double dual_minimum(const SlotInstance& s) {
  auto D = [&](double lambda) {
    double v = lambda * s.cell.p_max;
    for (int m = 0; m < s.channels; ++m) {
      double mx = 0.0;
      for (int l = 0; l < s.users; ++l) {
        mx = std::max(mx, scalar_mu(s.weights[l], s.gains[l * s.channels + m],
                                    s.cell.v_kappa + lambda, s.cell));
      }
      v += mx;
    }
    return v;
  };
  double top = 0.0;
  for (int l = 0; l < s.users; ++l) {
    for (int m = 0; m < s.channels; ++m) {
      const double g = s.gains[l * s.channels + m];
      top = std::max(top, s.weights[l] * g * g / (s.cell.noise_psd * kLn2));
    }
  }
  top = std::max(top, 1e-9);
  // D is convex: coarse grid, then ternary search around the best point.
  const int n = 400;
  int best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> grid(n + 1);
  for (int k = 0; k <= n; ++k) {
    grid[k] = k == 0 ? (s.cell.v_kappa > 0 ? 0.0 : top * 1e-12) : top * k / n;
    const double v = D(grid[k]);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double a = grid[std::max(best_k - 1, 0)];
  double b = grid[std::min(best_k + 1, n)];
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3;
    const double m2 = b - (b - a) / 3;
    if (D(m1) < D(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::min(best, D(0.5 * (a + b)));
}

double brute_force_frame(const FrameInstance& f, int levels) {
  const int L = f.slot_template.users;
  const int T = static_cast<int>(f.slot_gains.size());
  std::vector<double> phi(static_cast<std::size_t>(L) + 1, 0.0);
  for (int rho = 1; rho <= L; ++rho) phi[rho] = phi_fixed_point(rho, f.dcf);

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(static_cast<std::size_t>(L), 0);
  std::vector<int> alpha(static_cast<std::size_t>(L));
  while (true) {
    for (int l = 0; l < L; ++l) alpha[l] = f.options[l][idx[l]];
    std::vector<int> load(static_cast<std::size_t>(f.num_wifi) + 1, 0);
    for (int a : alpha) ++load[a];
    double wifi_power = 0.0;
    for (int n = 1; n <= f.num_wifi; ++n) wifi_power += wifi_power_direct(load[n], phi[load[n]], f.mac);
    double value = T * f.V * wifi_power;
    for (int l = 0; l < L; ++l) {
      if (alpha[l] == 0) continue;
      const int rho = load[alpha[l]];
      value -= T * f.slot_template.weights[l] * wifi_rate_direct(rho, phi[rho], f.mac) / rho;
    }
    // Macrocell users only: zero the weights of everyone else.
    SlotInstance s = f.slot_template;
    for (int l = 0; l < L; ++l) {
      if (alpha[l] != 0) s.weights[l] = 0.0;
    }
    for (int t = 0; t < T; ++t) {
      s.gains = f.slot_gains[t];
      value -= brute_force_slot(s, levels);
    }
    best = std::min(best, value);

    int l = L - 1;
    while (l >= 0) {
      if (++idx[l] < f.options[l].size()) break;
      idx[l] = 0;
      --l;
    }
    if (l < 0) return best;
  }
}

std::vector<double> stationary(const std::vector<std::vector<double>>& P, int iterations,
                               double tol) {
  const std::size_t n = P.size();
  std::vector<double> pi(n, 1.0 / n);
  std::vector<double> next(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * P[i][j];
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - pi[i]));
    pi.swap(next);
    if (diff < tol) break;
  }
  return pi;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs paired samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace ensra::oracle
