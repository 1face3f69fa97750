#include <doctest.h>

#include <cmath>

#include "ensra/error.hpp"
#include "oracles/oracles.hpp"
#include "oracles/validate.hpp"

using namespace ensra;

TEST_SUITE("oracles") {

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 6, 8, 100};
  const std::vector<double> down{5, 4, 3, 2, 1};
  CHECK(oracle::spearman(x, up) == doctest::Approx(1.0));
  CHECK(oracle::spearman(x, down) == doctest::Approx(-1.0));
  // Ties take average ranks: y ranks are 1.5, 1.5, 3, 4, 5.
  const std::vector<double> tied{1, 1, 2, 3, 4};
  CHECK(oracle::spearman(x, tied) == doctest::Approx(9.5 / std::sqrt(10.0 * 9.5)));
}

TEST_CASE("stationary distribution of a two-state chain") {
  const std::vector<std::vector<double>> P{{0.9, 0.1}, {0.3, 0.7}};
  const auto pi = oracle::stationary(P);
  CHECK(pi[0] == doctest::Approx(0.75));
  CHECK(pi[1] == doctest::Approx(0.25));
}

TEST_CASE("reference slot optimum") {
  oracle::SlotInstance s;
  s.users = 1;
  s.channels = 1;
  s.weights = {10.0};
  s.gains = {0.02};
  s.cell = {0.0, 20.0, 0.625, 1e-7};
  // No power price: the whole budget goes on the only channel.
  CHECK(oracle::continuous_slot(s) ==
        doctest::Approx(10.0 * oracle::channel_rate(20.0, 0.02, s.cell)));
  CHECK(oracle::brute_force_slot(s, 50) == doctest::Approx(oracle::continuous_slot(s)));
}

TEST_CASE("every suite passes on a small scenario") {
  SystemConfig cfg;
  cfg.num_users = 3;
  cfg.num_wifi = 2;
  cfg.num_locations = 9;
  cfg.num_subchannels = 3;
  cfg.frame_len = 20;
  cfg.num_frames = 20;
  cfg.seed = 7;
  for (const auto& name : check::suite_names()) {
    const auto r = check::run_suite(name, cfg);
    INFO(name << ": " << r.detail);
    CHECK(r.passed);
  }
  CHECK_THROWS_AS(check::run_suite("nope", cfg), ConfigError);
}

}
