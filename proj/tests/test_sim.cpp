#include <doctest.h>

#include <string>

#include "ensra/error.hpp"
#include "ensra/sim.hpp"
#include "oracles/validate.hpp"

using namespace ensra;

namespace {

SystemConfig small() {
  SystemConfig cfg;
  cfg.num_users = 3;
  cfg.num_wifi = 2;
  cfg.num_locations = 9;
  cfg.num_subchannels = 3;
  cfg.frame_len = 20;
  cfg.num_frames = 15;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("every Mb is either served or still queued") {
  for (Algorithm a : {Algorithm::kEnsra, Algorithm::kREnsra, Algorithm::kGpEnsra,
                      Algorithm::kHeuristic}) {
    SystemConfig cfg = small();
    cfg.window = 3;
    cfg.prediction_error = 0.2;
    const RunMetrics m = run(cfg, a);
    CHECK(check::conservation_error(m) < 1e-9);
    CHECK(m.max_cell_power <= cfg.p_max_cell * (1 + 1e-9));
    CHECK(m.slots_validated == 15LL * 20);
    CHECK(m.warmup_frames == 1);
  }
}

TEST_CASE("series records the frame-start state") {
  RunOptions opts;
  opts.record_series = true;
  const RunMetrics m = run(small(), Algorithm::kEnsra, opts);
  REQUIRE(m.series.size() == 15);
  CHECK(m.series[0].queue == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(m.series[14].frame == 14);
  CHECK(m.series[14].alpha.size() == 3);
}

TEST_CASE("serial kernels give the same run") {
  RunOptions serial;
  serial.mode = KernelMode::kSerial;
  const RunMetrics a = run(small(), Algorithm::kEnsra);
  const RunMetrics b = run(small(), Algorithm::kEnsra, serial);
  CHECK(a.avg_power == b.avg_power);
  CHECK(a.avg_queue_slot == b.avg_queue_slot);
}

TEST_CASE("sweep rows match individual runs") {
  const SystemConfig cfg = small();
  const auto rows = sweep(cfg, Algorithm::kEnsra, SweepAxis::kV, {0.1, 2.0}, 2);
  REQUIRE(rows.size() == 4);
  SystemConfig c = cfg;
  c.V = 2.0;
  c.seed = cfg.seed + 1;
  CHECK(rows[3] == make_row(3, c, Algorithm::kEnsra, run(c, Algorithm::kEnsra)));
  CHECK(rows[0].V == 0.1);
  CHECK(rows[1].seed == cfg.seed + 1);
  CHECK(sweep(cfg, Algorithm::kEnsra, SweepAxis::kV, {0.1, 2.0}, 2) == rows);
  CHECK_THROWS_AS(sweep(cfg, Algorithm::kEnsra, SweepAxis::kV, {}, 1), ConfigError);
}

TEST_CASE("axes") {
  SystemConfig cfg = small();
  apply_axis(cfg, parse_axis("W"), 4);
  CHECK(cfg.window == 4);
  apply_axis(cfg, parse_axis("error_rate"), 0.3);
  CHECK(cfg.prediction_error == 0.3);
  CHECK_THROWS_AS(apply_axis(cfg, SweepAxis::kWindow, 2.5), ConfigError);
  CHECK_THROWS_AS(parse_axis("speed"), ConfigError);
}

TEST_CASE("slot average stays within the frame-start correction") {
  const SystemConfig cfg = small();
  const RunMetrics m = run(cfg, Algorithm::kEnsra);
  const BoundReport b = bound_report(m, cfg, cfg.V);
  CHECK(b.queue_relation_holds);
  CHECK(b.queue_correction == doctest::Approx(0.5 * 19 * 3 * cfg.a_max() * cfg.slot_dt));
}

TEST_CASE("errors name the frame") {
  SystemConfig cfg = small();
  cfg.wifi_cells = {{0, 1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
  cfg.solver.selection_cap = 2;
  try {
    run(cfg, Algorithm::kEnsra);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("frame 0: ", 0) == 0);
  }
}

}
