#include <doctest.h>

#include "ensra/error.hpp"
#include "ensra/window.hpp"
#include "oracles/validate.hpp"

using namespace ensra;

namespace {

Scenario small(int window) {
  SystemConfig cfg;
  cfg.num_users = 3;
  cfg.num_wifi = 2;
  cfg.num_locations = 9;
  cfg.num_subchannels = 2;
  cfg.frame_len = 8;
  cfg.num_frames = 4;
  cfg.window = window;
  cfg.seed = 31;
  cfg.wifi_cells = {{0, 1, 3, 4}, {4, 5, 7, 8}};
  return Scenario::make(cfg, make_topology(cfg, cfg.wifi_cells));
}

}  // namespace

TEST_SUITE("window") {

TEST_CASE("single-frame window reduces to the per-frame search") {
  const Scenario sc = small(1);
  const EnvTrace env = generate_trace(sc.cfg, sc.topo);
  const std::vector<double> q0{2.0, 0.3, 5.0};
  const EnvTrace fc = env.slice(1, 1);
  const WindowDecision gp = gp_ensra_window(q0, fc, sc.cfg.V, 0.0, sc);
  const FrameDecision e = ensra_frame(q0, fc, 0, sc.cfg.V, sc);
  REQUIRE(gp.frames.size() == 1);
  CHECK(gp.frames[0].alpha == e.alpha);
  CHECK(gp.frames[0].slots == e.slots);
  CHECK(gp.iterations == 1);

  const WindowDecision ex = p_ensra_exact(q0, fc, sc.cfg.V, 0.0, sc);
  CHECK(ex.frames[0].alpha == e.alpha);
  CHECK(ex.F == doctest::Approx(gp.F));
}

TEST_CASE("descent never raises the window objective") {
  const Scenario sc = small(3);
  const EnvTrace env = generate_trace(sc.cfg, sc.topo);
  for (const auto& q0 : {std::vector<double>{0.0, 0.0, 0.0}, std::vector<double>{1.5, 0.2, 3.0},
                         std::vector<double>{30.0, 30.0, 30.0}}) {
    const WindowDecision d = gp_ensra_window(q0, env.slice(0, 3), 2.0, 0.5, sc);
    REQUIRE(d.F_history.size() >= 2);
    for (std::size_t i = 1; i < d.F_history.size(); ++i) {
      CHECK(d.F_history[i] <= d.F_history[i - 1] + 1e-9 * std::abs(d.F_history[i - 1]));
    }
    CHECK(d.F == doctest::Approx(window_objective(q0, env.slice(0, 3), d.frames, 2.0, 0.5, sc.cfg)));
  }
  const auto s = check::check_gp_monotone(sc.cfg, 4, 8);
  CHECK(s.monotone_violations == 0);
}

TEST_CASE("queue propagation and block weights") {
  const Scenario sc = small(2);
  const EnvTrace fc = generate_trace(sc.cfg, sc.topo).slice(0, 2);
  const std::vector<double> q0{1.0, 2.0, 3.0};
  std::vector<FrameDecision> idle(2);
  for (auto& f : idle) {
    f.alpha.assign(3, 0);
    f.slots.assign(8, SlotAllocation(2));
    f.rates.assign(8 * 3, 0.0);
    f.power.assign(8, 0.0);
  }
  const auto Q = window_queues(q0, fc, idle, sc.cfg);
  for (int l = 0; l < 3; ++l) {
    double expect = q0[static_cast<std::size_t>(l)];
    CHECK(Q[0][static_cast<std::size_t>(l)] == doctest::Approx(expect));
    for (int t = 0; t < 8; ++t) expect += fc.arrivals(t)[l] * sc.cfg.slot_dt;
    CHECK(Q[1][static_cast<std::size_t>(l)] == doctest::Approx(expect));
  }
  // Frame 0 weight adds the arrival-plus-theta mass of frame 1.
  const auto w0 = block_weights(q0, fc, idle, 0, 0.5, sc.cfg);
  for (int l = 0; l < 3; ++l) {
    double later = 0.0;
    for (int t = 8; t < 16; ++t) later += fc.arrivals(t)[l] + 0.5;
    CHECK(w0[static_cast<std::size_t>(l)] ==
          doctest::Approx(q0[static_cast<std::size_t>(l)] + sc.cfg.slot_dt * later));
  }
  const auto w1 = block_weights(q0, fc, idle, 1, 0.5, sc.cfg);
  for (int l = 0; l < 3; ++l) CHECK(w1[static_cast<std::size_t>(l)] == doctest::Approx(Q[1][static_cast<std::size_t>(l)]));
}

TEST_CASE("heavy traffic: block step is the reweighted per-frame search") {
  const auto s = check::check_gp_heavy(small(3).cfg, 2, 17);
  CHECK(s.not_heavy == 0);
  CHECK(s.step_mismatches == 0);
  CHECK(s.worst_reduction <= 1e-9);
}

TEST_CASE("exhaustive window search matches or beats descent on sampled windows") {
  const auto s = check::compare_exact_greedy(SystemConfig{}, 2, 23);
  CHECK(s.violations == 0);
}

TEST_CASE("exhaustive search refuses large windows") {
  Scenario sc = small(3);
  sc.cfg.solver.selection_cap = 10;
  const EnvTrace fc = generate_trace(sc.cfg, sc.topo).slice(0, 3);
  CHECK_THROWS_AS(p_ensra_exact(std::vector<double>{1, 1, 1}, fc, 1.0, 0.0, sc), ScaleError);
}

}
