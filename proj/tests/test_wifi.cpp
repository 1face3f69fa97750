#include <doctest.h>

#include <cmath>

#include "ensra/error.hpp"
#include "ensra/wifi.hpp"
#include "oracles/oracles.hpp"

using namespace ensra;

TEST_SUITE("wifi") {

TEST_CASE("single station transmits with 2/(W+1)") {
  DcfParams dcf;
  CHECK(solve_phi(1, dcf).phi == 2.0 / 33.0);
  dcf.cw_min = 16;
  CHECK(solve_phi(1, dcf).phi == 2.0 / 17.0);
}

TEST_CASE("fixed point matches the damped iteration") {
  const DcfParams dcf;
  for (int rho = 2; rho <= 30; ++rho) {
    const PhiSolution s = solve_phi(rho, dcf);
    CHECK(s.residual < 1e-10);
    CHECK(s.phi == doctest::Approx(oracle::phi_fixed_point(rho, dcf)).epsilon(1e-9));
  }
}

TEST_CASE("phi falls as contention grows") {
  const DcfParams dcf;
  double last = 1.0;
  for (int rho = 1; rho <= 12; ++rho) {
    const double phi = solve_phi(rho, dcf).phi;
    CHECK(phi < last);
    last = phi;
  }
}

TEST_CASE("rate and power agree with the direct formulas") {
  const MacParams mac;
  const DcfParams dcf;
  for (int rho = 1; rho <= 10; ++rho) {
    const double phi = solve_phi(rho, dcf).phi;
    CHECK(wifi_total_rate(rho, phi, mac) ==
          doctest::Approx(oracle::wifi_rate_direct(rho, phi, mac)).epsilon(1e-12));
    CHECK(wifi_power(rho, phi, mac) ==
          doctest::Approx(oracle::wifi_power_direct(rho, phi, mac)).epsilon(1e-12));
  }
}

TEST_CASE("idle AP draws Eb/Tb") {
  const MacParams mac;
  CHECK(wifi_power(0, 0.0, mac) == doctest::Approx(0.8));
  CHECK(wifi_total_rate(0, 0.0, mac) == 0.0);
}

TEST_CASE("one station: hand-computed slot mix") {
  const MacParams mac;
  const double phi = 2.0 / 33.0;
  const double slot = (1 - phi) * 28.0 + phi * 100.0;
  CHECK(wifi_total_rate(1, phi, mac) == doctest::Approx(phi * 800.0 / slot));
  CHECK(wifi_power(1, phi, mac) == doctest::Approx(((1 - phi) * 22.4 + phi * 180.0) / slot));
}

TEST_CASE("table and per-user shares") {
  const SystemConfig cfg;
  const WifiModel m(cfg);
  CHECK(m.max_users() == cfg.num_users);
  const std::vector<int> alpha{1, 1, 0, 2};
  CHECK(m.user_rate(alpha, 0) == doctest::Approx(m.total_rate(2) / 2));
  CHECK(m.user_rate(alpha, 3) == doctest::Approx(m.total_rate(1)));
  CHECK_THROWS_AS(m.user_rate(alpha, 2), DomainError);
  CHECK(m.total_power(alpha, 3) == doctest::Approx(m.power(2) + m.power(1) + m.power(0)));
  CHECK(WifiModel::loads(alpha, 3) == std::vector<int>{1, 2, 1, 0});
  CHECK_THROWS_AS(WifiModel::loads(std::vector<int>{4}, 3), DomainError);
  CHECK_THROWS_AS(solve_phi(0, cfg.dcf), DomainError);
}

}
