#include "ensra/env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ensra/error.hpp"

namespace ensra {

EnvTrace::EnvTrace(int users, int channels, int frame_len_, int frames)
    : num_users(users), num_channels(channels), frame_len(frame_len_), num_frames(frames) {
  location.assign(static_cast<std::size_t>(frames) * users, 0);
  gain.assign(static_cast<std::size_t>(frames) * frame_len_ * users * channels, 0.0);
  arrival.assign(static_cast<std::size_t>(frames) * frame_len_ * users, 0.0);
}

std::span<const int> EnvTrace::locations(int frame) const {
  return {location.data() + static_cast<std::size_t>(frame) * num_users,
          static_cast<std::size_t>(num_users)};
}

std::span<const double> EnvTrace::gains(int slot) const {
  const auto n = static_cast<std::size_t>(num_users) * num_channels;
  return {gain.data() + static_cast<std::size_t>(slot) * n, n};
}

std::span<const double> EnvTrace::arrivals(int slot) const {
  return {arrival.data() + static_cast<std::size_t>(slot) * num_users,
          static_cast<std::size_t>(num_users)};
}

double EnvTrace::gain_at(int slot, int user, int channel) const {
  return gains(slot)[static_cast<std::size_t>(user) * num_channels + channel];
}

EnvTrace EnvTrace::slice(int first_frame, int count) const {
  if (first_frame < 0 || first_frame >= num_frames) throw DomainError("slice start out of range");
  count = std::min(count, num_frames - first_frame);
  EnvTrace out(num_users, num_channels, frame_len, count);
  const auto loc0 = static_cast<std::size_t>(first_frame) * num_users;
  std::copy_n(location.begin() + loc0, out.location.size(), out.location.begin());
  const auto slot0 = static_cast<std::size_t>(first_frame) * frame_len;
  std::copy_n(gain.begin() + slot0 * num_users * num_channels, out.gain.size(), out.gain.begin());
  std::copy_n(arrival.begin() + slot0 * num_users, out.arrival.size(), out.arrival.begin());
  return out;
}

std::vector<int> MobilityChain::neighbours(int location) const {
  const int r = location / side_;
  const int c = location % side_;
  std::vector<int> out;
  if (r > 0) out.push_back(location - side_);
  if (r + 1 < side_) out.push_back(location + side_);
  if (c > 0) out.push_back(location - 1);
  if (c + 1 < side_) out.push_back(location + 1);
  return out;
}

std::vector<double> MobilityChain::row(int location) const {
  std::vector<double> p(static_cast<std::size_t>(side_) * side_, 0.0);
  const auto nb = neighbours(location);
  if (nb.empty()) {
    p[location] = 1.0;
    return p;
  }
  p[location] = stay_;
  for (int n : nb) p[n] += (1.0 - stay_) / nb.size();
  return p;
}

int MobilityChain::step(int location, Rng& rng) const {
  const double u = uniform01(rng);
  if (u < stay_) return location;
  const auto nb = neighbours(location);
  if (nb.empty()) return location;
  const double v = (u - stay_) / (1.0 - stay_);
  const auto k = std::min(static_cast<std::size_t>(v * nb.size()), nb.size() - 1);
  return nb[k];
}

int ArrivalChain::step(int state, Rng& rng) const {
  const double u = uniform01(rng);
  if (u < stay_) return state;
  const int hop = (u - stay_) < 0.5 * (1.0 - stay_) ? 1 : 2;
  return (state + hop) % kStates;
}

double sample_channel(double distance_m, Rng& rng, const SystemConfig& cfg) {
  if (!(distance_m >= cfg.min_distance_m)) {
    throw DomainError("distance " + std::to_string(distance_m) + " m below the " +
                      std::to_string(cfg.min_distance_m) + " m minimum");
  }
  return rayleigh_unit_power(rng) / std::pow(distance_m, 1.5);
}

EnvTrace generate_trace(const SystemConfig& cfg, const Topology& topo) {
  const int L = cfg.num_users;
  const int M = cfg.num_subchannels;
  const int T = cfg.frame_len;
  EnvTrace trace(L, M, T, cfg.num_frames);

  Rng init_rng = make_rng(cfg.seed, Stream::kInitialLocation);
  Rng move_rng = make_rng(cfg.seed, Stream::kMobility);
  Rng chan_rng = make_rng(cfg.seed, Stream::kChannel);
  Rng arr_rng = make_rng(cfg.seed, Stream::kArrival);

  const MobilityChain mobility(topo.side, cfg.mobility_stay);
  const ArrivalChain traffic(cfg.mean_arrival, cfg.arrival_stay);

  std::vector<int> loc(static_cast<std::size_t>(L));
  std::vector<int> state(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) loc[l] = uniform_int(init_rng, cfg.num_locations);
  for (int l = 0; l < L; ++l) state[l] = uniform_int(arr_rng, ArrivalChain::kStates);

  for (int k = 0; k < cfg.num_frames; ++k) {
    if (k > 0) {
      for (int l = 0; l < L; ++l) loc[l] = mobility.step(loc[l], move_rng);
    }
    std::copy(loc.begin(), loc.end(), trace.location.begin() + static_cast<std::ptrdiff_t>(k) * L);
    for (int tau = 0; tau < T; ++tau) {
      const auto t = static_cast<std::size_t>(k) * T + tau;
      for (int l = 0; l < L; ++l) {
        const double d = topo.distance_m[loc[l]];
        for (int m = 0; m < M; ++m) {
          trace.gain[(t * L + l) * M + m] = sample_channel(d, chan_rng, cfg);
        }
        if (t > 0) state[l] = traffic.step(state[l], arr_rng);
        trace.arrival[t * L + l] = traffic.value(state[l]);
      }
    }
  }
  return trace;
}

WindowForecast forecast_window(const EnvTrace& truth, int first_frame, int window,
                               double error_rate, const Topology& topo,
                               const SystemConfig& cfg, Rng& rng) {
  if (!(error_rate >= 0 && error_rate <= 1)) {
    throw ConfigError("prediction_error must lie in [0, 1]");
  }
  WindowForecast out{truth.slice(first_frame, window)};
  EnvTrace& f = out.trace;
  if (error_rate == 0) return out;

  const int L = f.num_users;
  const int M = f.num_channels;
  const int T = f.frame_len;
  const ArrivalChain traffic(cfg.mean_arrival, cfg.arrival_stay);
  auto corrupt = [&]() {
    ++out.future_items;
    const bool hit = uniform01(rng) < error_rate;
    out.corrupted += hit ? 1 : 0;
    return hit;
  };
  for (int w = 1; w < f.num_frames; ++w) {
    for (int l = 0; l < L; ++l) {
      int& loc = f.location[static_cast<std::size_t>(w) * L + l];
      if (corrupt()) loc = uniform_int(rng, topo.num_locations());
    }
    for (int tau = 0; tau < T; ++tau) {
      const auto t = static_cast<std::size_t>(w) * T + tau;
      for (int l = 0; l < L; ++l) {
        const double d = topo.distance_m[f.location[static_cast<std::size_t>(w) * L + l]];
        for (int m = 0; m < M; ++m) {
          if (corrupt()) f.gain[(t * L + l) * M + m] = sample_channel(d, rng, cfg);
        }
        if (corrupt()) {
          f.arrival[t * L + l] = traffic.value(uniform_int(rng, ArrivalChain::kStates));
        }
      }
    }
  }
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

template <class T>
T parse_field(std::istringstream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw ShapeError(std::string("trace row missing ") + what);
  T v{};
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DomainError(std::string("bad ") + what + " '" + tok + "' in trace");
  }
  return v;
}

}  // namespace

void write_trace(std::ostream& out, const EnvTrace& trace) {
  out << "# ensra-trace " << trace.num_users << ' ' << trace.num_channels << ' '
      << trace.frame_len << ' ' << trace.num_frames << '\n';
  for (int t = 0; t < trace.num_slots(); ++t) {
    const auto loc = trace.locations(t / trace.frame_len);
    for (int l = 0; l < trace.num_users; ++l) {
      out << t << ' ' << l << ' ' << loc[l] << ' ';
      put(out, trace.arrivals(t)[l]);
      for (int m = 0; m < trace.num_channels; ++m) {
        out << ' ';
        put(out, trace.gain_at(t, l, m));
      }
      out << '\n';
    }
  }
}

EnvTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ShapeError("empty trace");
  std::istringstream head(line);
  std::string hash, tag;
  int users = 0, chans = 0, flen = 0, frames = 0;
  if (!(head >> hash >> tag >> users >> chans >> flen >> frames) || hash != "#" ||
      tag != "ensra-trace") {
    throw ShapeError("trace header must be '# ensra-trace users channels frame_len frames'");
  }
  EnvTrace trace(users, chans, flen, frames);
  const long long rows = static_cast<long long>(trace.num_slots()) * users;
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ShapeError("trace ended after " + std::to_string(i) + " rows");
    std::istringstream row(line);
    const int t = parse_field<int>(row, "slot");
    const int l = parse_field<int>(row, "user");
    if (t != i / users || l != i % users) throw ShapeError("trace rows out of order at row " + std::to_string(i));
    const int loc = parse_field<int>(row, "location");
    trace.location[static_cast<std::size_t>(t / flen) * users + l] = loc;
    trace.arrival[static_cast<std::size_t>(t) * users + l] = parse_field<double>(row, "arrival");
    for (int m = 0; m < chans; ++m) {
      trace.gain[(static_cast<std::size_t>(t) * users + l) * chans + m] =
          parse_field<double>(row, "gain");
    }
  }
  return trace;
}

}  // namespace ensra
