#include <doctest.h>

#include "ensra/error.hpp"
#include "ensra/schedulers.hpp"
#include "oracles/validate.hpp"

using namespace ensra;

namespace {

SystemConfig tiny() {
  SystemConfig cfg;
  cfg.num_users = 3;
  cfg.num_wifi = 2;
  cfg.num_locations = 9;
  cfg.num_subchannels = 3;
  cfg.frame_len = 10;
  cfg.num_frames = 3;
  cfg.seed = 21;
  cfg.wifi_cells = {{0, 1, 3, 4}, {4, 5, 7, 8}};
  return cfg;
}

Scenario tiny_scenario() {
  const SystemConfig cfg = tiny();
  return Scenario::make(cfg, make_topology(cfg, cfg.wifi_cells));
}

// One frame with every user at `loc` and the same gains in every slot.
EnvTrace constant_frame(const SystemConfig& cfg, const std::vector<int>& loc,
                        const std::vector<double>& g) {
  EnvTrace t(cfg.num_users, cfg.num_subchannels, cfg.frame_len, 1);
  t.location = loc;
  for (int s = 0; s < cfg.frame_len; ++s) {
    std::copy(g.begin(), g.end(), t.gain.begin() + static_cast<long>(s * g.size()));
    for (int l = 0; l < cfg.num_users; ++l) t.arrival[static_cast<std::size_t>(s * cfg.num_users + l)] = 1.0;
  }
  return t;
}

}  // namespace

TEST_SUITE("schedulers") {

TEST_CASE("frame search meets the exhaustive optimum") {
  const auto s = check::compare_ensra(SystemConfig{}, 3, 5, 0.01);
  CHECK(s.failures == 0);
}

TEST_CASE("selection options follow coverage") {
  const Scenario sc = tiny_scenario();
  const std::vector<int> loc{0, 4, 2};
  const auto opts = selection_options(loc, sc.topo);
  CHECK(opts[0] == std::vector<int>{0, 1});
  CHECK(opts[1] == std::vector<int>{0, 1, 2});
  CHECK(opts[2] == std::vector<int>{0});
  CHECK(cellular_mask(std::vector<int>{0, 1, 0}) == 0b101u);
}

TEST_CASE("decision is feasible and its objective consistent") {
  const Scenario sc = tiny_scenario();
  const EnvTrace env = generate_trace(sc.cfg, sc.topo);
  const std::vector<double> q{4.0, 0.2, 9.0};
  const FrameDecision d = ensra_frame(q, env, 1, sc.cfg.V, sc);
  for (int s = 0; s < d.num_slots(); ++s) {
    CHECK_NOTHROW(validate_decision(d.alpha, d.slots[static_cast<std::size_t>(s)], env.locations(1),
                                    sc.topo, sc.cfg));
  }
  CHECK(frame_objective(d, q, sc.cfg.V) == doctest::Approx(d.objective));
  const FrameDecision serial = ensra_frame(q, env, 1, sc.cfg.V, sc, KernelMode::kSerial);
  CHECK(serial.alpha == d.alpha);
  CHECK(serial.slots == d.slots);
}

TEST_CASE("scaling backlog and V together keeps the decision") {
  const Scenario sc = tiny_scenario();
  const EnvTrace env = generate_trace(sc.cfg, sc.topo);
  const std::vector<double> q{4.0, 0.2, 9.0};
  const FrameDecision a = ensra_frame(q, env, 0, 0.5, sc);
  for (double c : {0.25, 3.0, 40.0}) {
    const std::vector<double> qc{4.0 * c, 0.2 * c, 9.0 * c};
    const FrameDecision b = ensra_frame(qc, env, 0, 0.5 * c, sc);
    CHECK(b.alpha == a.alpha);
    CHECK(b.objective == doctest::Approx(c * a.objective).epsilon(1e-6));
  }
}

TEST_CASE("combinatorial cap") {
  Scenario sc = tiny_scenario();
  sc.cfg.solver.selection_cap = 2;
  const EnvTrace env = constant_frame(sc.cfg, {4, 4, 4}, std::vector<double>(9, 0.02));
  CHECK_THROWS_AS(ensra_frame(std::vector<double>{1, 1, 1}, env, 0, 0.5, sc), ScaleError);
  CHECK_THROWS_AS(ensra_frame(std::vector<double>{1, -1, 1}, env, 0, 0.5, sc), DomainError);
}

TEST_CASE("R-ENSRA with the true constant channel matches ENSRA") {
  const Scenario sc = tiny_scenario();
  const std::vector<double> g{0.02, 0.03, 0.01, 0.015, 0.04, 0.02, 0.03, 0.01, 0.025};
  const EnvTrace env = constant_frame(sc.cfg, {0, 4, 8}, g);
  const std::vector<double> q{6.0, 1.0, 3.0};
  const ChannelSampler fixed = [&](Rng&, std::span<double> out) {
    std::copy(g.begin(), g.end(), out.begin());
  };
  Rng rng = make_rng(1, Stream::kMonteCarlo);
  const FrameDecision r = r_ensra_frame(q, env, 0, 0.5, sc, rng, fixed);
  const FrameDecision e = ensra_frame(q, env, 0, 0.5, sc);
  CHECK(r.alpha == e.alpha);
  CHECK(r.slots == e.slots);
}

TEST_CASE("heuristic") {
  SystemConfig cfg = tiny();
  cfg.num_users = 2;
  cfg.wifi_cells = {{0}, {0}};
  const Scenario sc = Scenario::make(cfg, make_topology(cfg, cfg.wifi_cells));
  const std::vector<double> g(6, 0.02);
  const std::vector<double> q{2.0, 2.0};

  SUBCASE("far users spread over the covering APs") {
    const EnvTrace env = constant_frame(cfg, {0, 0}, g);
    const FrameDecision d = heuristic_frame(q, env, 0, sc, 0.0);
    CHECK(d.alpha == std::vector<int>{1, 2});
    for (const auto& s : d.slots) CHECK(s.total_power() == 0.0);
  }
  SUBCASE("users near the base station stay on the macrocell") {
    const EnvTrace env = constant_frame(cfg, {0, 0}, g);
    const FrameDecision d = heuristic_frame(q, env, 0, sc);
    CHECK(d.alpha == std::vector<int>{0, 0});
    for (const auto& s : d.slots) CHECK(s.total_power() == doctest::Approx(cfg.p_max_cell));
  }
  SUBCASE("no coverage means macrocell") {
    const EnvTrace env = constant_frame(cfg, {8, 4}, g);
    const FrameDecision d = heuristic_frame(q, env, 0, sc, 0.0);
    CHECK(d.alpha == std::vector<int>{0, 0});
  }
}

}
