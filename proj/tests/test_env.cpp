#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ensra/env.hpp"
#include "ensra/error.hpp"
#include "ensra/topology.hpp"
#include "oracles/oracles.hpp"

using namespace ensra;

namespace {

SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.num_users = 3;
  cfg.num_wifi = 2;
  cfg.num_locations = 9;
  cfg.num_subchannels = 2;
  cfg.frame_len = 10;
  cfg.num_frames = 8;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("same seed, same trace; different seed, different trace") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = make_topology(cfg, cfg.seed);
  const EnvTrace a = generate_trace(cfg, topo);
  const EnvTrace b = generate_trace(cfg, topo);
  CHECK(a == b);
  SystemConfig other = cfg;
  other.seed = 6;
  CHECK_FALSE(generate_trace(other, topo) == a);
  CHECK(a.num_slots() == 80);
  CHECK(a.gain.size() == 80u * 3 * 2);
}

TEST_CASE("mobility rows are stochastic and border cells stay in the grid") {
  const MobilityChain chain(3, 0.5);
  CHECK(chain.neighbours(0).size() == 2);
  CHECK(chain.neighbours(4).size() == 4);
  for (int s = 0; s < 9; ++s) {
    const auto r = chain.row(s);
    double sum = 0.0;
    for (double p : r) sum += p;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(r[static_cast<std::size_t>(s)] == doctest::Approx(0.5));
  }
}

TEST_CASE("empirical occupancy matches the stationary distribution") {
  const int side = 4;
  const MobilityChain chain(side, 0.3);
  std::vector<std::vector<double>> P;
  for (int s = 0; s < side * side; ++s) P.push_back(chain.row(s));
  const auto pi = oracle::stationary(P);

  Rng rng = make_rng(99, Stream::kMobility);
  std::vector<double> hist(pi.size(), 0.0);
  const int steps = 400000;
  int s = 0;
  for (int i = 0; i < steps; ++i) {
    s = chain.step(s, rng);
    hist[static_cast<std::size_t>(s)] += 1.0 / steps;
  }
  for (std::size_t i = 0; i < pi.size(); ++i) CHECK(std::abs(hist[i] - pi[i]) < 0.01);
}

TEST_CASE("arrival chain averages to the mean") {
  const ArrivalChain chain(2.0, 0.6);
  CHECK(chain.value(2) == 4.0);
  CHECK(chain.probability(0, 1) == doctest::Approx(0.2));
  Rng rng = make_rng(3, Stream::kArrival);
  int state = 1;
  double sum = 0.0;
  const int steps = 400000;
  for (int i = 0; i < steps; ++i) {
    state = chain.step(state, rng);
    sum += chain.value(state);
  }
  CHECK(sum / steps == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("Rayleigh gain has unit power and d^-1.5 amplitude loss") {
  const SystemConfig cfg;
  Rng a = make_rng(1, Stream::kChannel);
  Rng b = make_rng(1, Stream::kChannel);
  double sum_sq = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double near = sample_channel(10.0, a, cfg);
    const double far = sample_channel(40.0, b, cfg);
    CHECK(far == doctest::Approx(near / 8.0));
    const double xi = near * std::pow(10.0, 1.5);
    sum_sq += xi * xi;
  }
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(sample_channel(5.0, a, cfg), DomainError);
}

TEST_CASE("forecast corruption") {
  const SystemConfig cfg = small_cfg();
  const Topology topo = make_topology(cfg, cfg.seed);
  const EnvTrace truth = generate_trace(cfg, topo);
  Rng rng = make_rng(cfg.seed, Stream::kForecast);

  const WindowForecast exact = forecast_window(truth, 2, 3, 0.0, topo, cfg, rng);
  CHECK(exact.trace == truth.slice(2, 3));
  CHECK(exact.corrupted == 0);

  const WindowForecast noisy = forecast_window(truth, 2, 3, 1.0, topo, cfg, rng);
  const EnvTrace ref = truth.slice(2, 3);
  CHECK(noisy.corrupted == noisy.future_items);
  CHECK(noisy.future_items == 2LL * (3 + 10 * 3 * 2 + 10 * 3));
  for (int l = 0; l < 3; ++l) CHECK(noisy.trace.locations(0)[l] == ref.locations(0)[l]);
  for (int t = 0; t < 10; ++t) {
    for (int l = 0; l < 3; ++l) CHECK(noisy.trace.arrivals(t)[l] == ref.arrivals(t)[l]);
  }
  int same_gain = 0;
  for (int t = 10; t < 30; ++t) {
    for (int l = 0; l < 3; ++l) same_gain += noisy.trace.gain_at(t, l, 0) == ref.gain_at(t, l, 0);
  }
  CHECK(same_gain == 0);

  const WindowForecast clipped = forecast_window(truth, 7, 3, 0.0, topo, cfg, rng);
  CHECK(clipped.trace.num_frames == 1);
}

TEST_CASE("trace text round trip") {
  const SystemConfig cfg = small_cfg();
  const EnvTrace t = generate_trace(cfg, make_topology(cfg, cfg.seed));
  std::stringstream s;
  write_trace(s, t);
  CHECK(read_trace(s) == t);
  std::istringstream bad("# not-a-trace\n");
  CHECK_THROWS(read_trace(bad));
}

}
