#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/rng.hpp"
#include "ensra/topology.hpp"

namespace ensra {

/// Realized (or forecast) randomness for a run of whole frames: one location
/// per user per frame, one gain per user/subchannel/slot, one arrival rate
/// (Mbps) per user per slot.
struct EnvTrace {
  int num_users = 0;
  int num_channels = 0;
  int frame_len = 0;
  int num_frames = 0;
  std::vector<int> location;    // frames x L
  std::vector<double> gain;     // slots x L x M
  std::vector<double> arrival;  // slots x L

  EnvTrace() = default;
  EnvTrace(int users, int channels, int frame_len, int frames);

  int num_slots() const { return num_frames * frame_len; }
  std::span<const int> locations(int frame) const;
  std::span<const double> gains(int slot) const;  // L*M, row per user
  std::span<const double> arrivals(int slot) const;
  double gain_at(int slot, int user, int channel) const;

  /// Frames [first, first + count), clipped to the trace end.
  EnvTrace slice(int first_frame, int count) const;

  friend bool operator==(const EnvTrace&, const EnvTrace&) = default;
};

/// Lazy random walk on the square grid: stay with probability `stay`,
/// otherwise move to a uniformly chosen in-grid 4-neighbour (border cells
/// spread the move mass over fewer neighbours).
class MobilityChain {
 public:
  MobilityChain(int side, double stay) : side_(side), stay_(stay) {}

  std::vector<int> neighbours(int location) const;
  /// Transition probabilities from `location` over all side*side cells.
  std::vector<double> row(int location) const;
  int step(int location, Rng& rng) const;

 private:
  int side_;
  double stay_;
};

/// Three-level traffic source {0, mean, 2 mean} Mbps; stays with probability
/// `stay`, otherwise jumps to one of the other two levels with equal odds.
class ArrivalChain {
 public:
  static constexpr int kStates = 3;

  ArrivalChain(double mean, double stay) : mean_(mean), stay_(stay) {}

  double value(int state) const { return state * mean_; }
  double probability(int from, int to) const { return from == to ? stay_ : 0.5 * (1.0 - stay_); }
  int step(int state, Rng& rng) const;

 private:
  double mean_;
  double stay_;
};

/// Rayleigh gain xi / d^1.5 with E[xi^2] = 1. Throws DomainError when d is
/// below cfg.min_distance_m.
double sample_channel(double distance_m, Rng& rng, const SystemConfig& cfg);

/// Full trace of cfg.num_frames frames. Locations, channels and arrivals draw
/// from separate streams of cfg.seed.
EnvTrace generate_trace(const SystemConfig& cfg, const Topology& topo);

struct WindowForecast {
  EnvTrace trace;
  long long future_items = 0;  // items eligible for corruption
  long long corrupted = 0;
};

/// Prediction of frames [first_frame, first_frame + window) of `truth`.
/// The first frame is exact; every location, gain and arrival of later frames
/// is independently replaced with probability `error_rate` by a random value:
/// a uniform location, a uniform arrival level, or a fresh Rayleigh draw at
/// the forecast location's distance.
WindowForecast forecast_window(const EnvTrace& truth, int first_frame, int window,
                               double error_rate, const Topology& topo,
                               const SystemConfig& cfg, Rng& rng);

/// Text trace format, one row per (slot, user):
///   slot user location arrival_mbps gain_0 ... gain_{M-1}
/// preceded by a header line "# ensra-trace users channels frame_len frames".
void write_trace(std::ostream& out, const EnvTrace& trace);
EnvTrace read_trace(std::istream& in);

}  // namespace ensra
