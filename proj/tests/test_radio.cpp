#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "uabsim/radio.hpp"
#include "uabsim/rng.hpp"
#include "uabsim/scenario.hpp"

using namespace uabsim;

TEST_CASE("beam gain reference values") {
  CHECK(beam_gain(100.0, 9) == Catch::Approx(23.03).margin(0.05));
  CHECK(beam_gain(180.0, 1) == Catch::Approx(-5.0).margin(0.05));
}

TEST_CASE("halving the beam count lowers gain by about 6 dB") {
  CHECK(beam_gain(100.0, 4) - beam_gain(100.0, 8) ==
        Catch::Approx(-10.0 * std::log10(2.0) * 2.0).margin(0.01));
  // Independent check against the square-degree closed form across a sweep.
  for (double fov : {60.0, 100.0, 140.0, 180.0}) {
    for (int nb : {1, 4, 9, 16}) {
      const double omega_sr =
          2.0 * M_PI * (1.0 - std::cos(fov * M_PI / 360.0)) / nb;
      const double omega_sqdeg = omega_sr * 180.0 / M_PI;
      const double expected =
          10.0 * std::log10(41000.0) - 20.0 * std::log10(omega_sqdeg);
      CHECK(beam_gain(fov, nb) == Catch::Approx(expected).margin(1e-6));
    }
  }
}

TEST_CASE("beam gain rejects degenerate arguments") {
  CHECK_THROWS(beam_gain(0.0, 9));
  CHECK_THROWS(beam_gain(190.0, 9));
  CHECK_THROWS(beam_gain(100.0, 0));
  CHECK_NOTHROW(beam_gain(180.0, 1));
}

TEST_CASE("path loss reference values") {
  const LinkBudgetConfig cfg;
  const double pl100 = path_loss(100.0, true, cfg);
  CHECK(pl100 == Catch::Approx(28.0 + 44.0 + 20.0 * std::log10(30.0)).margin(1e-3));
  const double pl1 = path_loss(1.0, true, cfg);
  CHECK(pl1 == Catch::Approx(28.0 + 20.0 * std::log10(30.0)).margin(1e-3));
}

TEST_CASE("path loss properties") {
  const LinkBudgetConfig cfg;
  double prev = path_loss(1.0, true, cfg);
  for (double d : {10.0, 50.0, 100.0, 400.0, 1000.0}) {
    const double cur = path_loss(d, true, cfg);
    CHECK(cur > prev);
    prev = cur;
  }
  for (double d : {50.0, 200.0, 800.0}) {
    CHECK(path_loss(d, false, cfg) >
          path_loss(d, true, cfg));
  }
  CHECK_THROWS_WITH(path_loss(0.0, true, cfg),
                    Catch::Matchers::ContainsSubstring("degenerate"));
}

TEST_CASE("sinr reference values") {
  CHECK(sinr_db(-63.0, {}, -106.0) == Catch::Approx(43.0).margin(1e-9));
  // One interferer at the noise floor costs about 3 dB.
  CHECK(sinr_db(-63.0, {-106.0}, -106.0) ==
        Catch::Approx(43.0 - 10.0 * std::log10(2.0)).margin(1e-6));
  // A dominant interferer drives SINR toward the S/I ratio.
  CHECK(sinr_db(-63.0, {-63.0}, -200.0) == Catch::Approx(0.0).margin(1e-3));
}

TEST_CASE("beam geometry footprint and partition") {
  BeamGeometry geom;
  geom.fov_deg = 100.0;
  geom.n_beam = 9;
  geom.altitude_m = 200.0;
  const double side = 2.0 * 200.0 * std::tan(100.0 * M_PI / 360.0);
  CHECK(geom.footprint_side() == Catch::Approx(side).margin(1e-9));
  CHECK(geom.beam_radius() == Catch::Approx(side / 6.0).margin(1e-9));

  const Point uabs{300.0, 400.0};
  const auto centers = geom.beam_centers();
  REQUIRE(centers.size() == 9);
  // Beam circles are disjoint, so classification agrees with direct distance.
  Rng rng(99);
  const double radius = geom.beam_radius();
  for (int trial = 0; trial < 400; ++trial) {
    const Point p{uabs.x + (rng.uniform() - 0.5) * side * 1.2,
                  uabs.y + (rng.uniform() - 0.5) * side * 1.2};
    const int j = geom.beam_index(uabs, p);
    int expected = -1;
    for (int k = 0; k < 9; ++k) {
      const Point c{uabs.x + centers[k].x, uabs.y + centers[k].y};
      if (distance(c, p) <= radius) {
        CHECK(expected == -1);  // never inside two beams at once
        expected = k;
      }
    }
    CHECK(j == expected);
  }
  // The center of each beam maps to its own index.
  for (int k = 0; k < 9; ++k) {
    const Point c{uabs.x + centers[k].x, uabs.y + centers[k].y};
    CHECK(geom.beam_index(uabs, c) == k);
  }
}

TEST_CASE("coverage matrix is deterministic and interference cannot raise rates") {
  const ServiceArea area = make_area(0, 1500.0, 700.0, 12);
  const MobilityTrace trace = generate_trace(area, 5, 4, 14.0, 10.0);
  LinkBudgetConfig cfg;
  BeamGeometry geom;
  geom.fov_deg = 100.0;
  geom.n_beam = 9;
  geom.altitude_m = 200.0;
  std::vector<Point> uabs = {{300.0, 300.0}, {900.0, 400.0}, {1200.0, 200.0}};

  std::vector<Point> gue(area.gue_count);
  for (int g = 0; g < area.gue_count; ++g) gue[g] = trace.at(2, g);

  const CoverageMatrix a = compute_coverage(uabs, gue, area, cfg, geom, 123);
  const CoverageMatrix b = compute_coverage(uabs, gue, area, cfg, geom, 123);
  REQUIRE(a.n_g == area.gue_count);
  REQUIRE(a.n_u == 3);
  for (int g = 0; g < a.n_g; ++g) {
    CHECK(a.cov_gm(g, 0) == b.cov_gm(g, 0));
    CHECK(a.rate_gm(g, 0) == b.rate_gm(g, 0));
    for (int u = 0; u < a.n_u; ++u) {
      CHECK(a.cov_gu(g, u) == b.cov_gu(g, u));
      CHECK(a.beam_of(g, u) == b.beam_of(g, u));
      CHECK(a.rate_gu(g, u) == b.rate_gu(g, u));
    }
  }

  for (int g = 0; g < a.n_g; ++g) {
    if (a.cov_gm(g, 0)) {
      CHECK(a.rate_gm(g, 0) > 0.0);
      for (int u = 0; u < a.n_u; ++u) {
        CHECK(a.rate_i_gmu(g, 0, u) <= a.rate_gm(g, 0) + 1e-12);
        CHECK(a.rate_i_gmu(g, 0, u) >= 0.0);
        // Potential interference requires dual coverage.
        if (a.pot_mu(g, 0, u)) CHECK(a.cov_gu(g, u));
      }
    }
    for (int u = 0; u < a.n_u; ++u) {
      if (a.cov_gu(g, u)) {
        CHECK(a.rate_gu(g, u) > 0.0);
        CHECK(a.rate_i_gum(g, u, 0) <= a.rate_gu(g, u) + 1e-12);
        CHECK(a.beam_of(g, u) >= 0);
        CHECK(a.beam_of(g, u) < geom.n_beam);
      } else {
        CHECK(a.beam_of(g, u) == -1);
      }
      if (a.pot_um(g, u, 0)) CHECK(a.cov_gm(g, 0));
    }
  }

  // Backhaul rates are populated for every UABS.
  for (int u = 0; u < a.n_u; ++u) CHECK(a.rate_um(u, 0) >= 0.0);
}

TEST_CASE("coverage shrinks with distance in expectation") {
  const ServiceArea area = make_area(0, 1500.0, 700.0, 2);
  const LinkBudgetConfig cfg;
  BeamGeometry geom;
  geom.fov_deg = 100.0;
  geom.n_beam = 9;
  geom.altitude_m = 200.0;
  int near_cov = 0, far_cov = 0;
  const int trials = 200;
  // User 0 sits close to the MBS, user 1 at the far corner.
  std::vector<Point> gue = {{area.mbs_position.x + 40.0, area.mbs_position.y},
                            {1490.0, 690.0}};
  for (int i = 0; i < trials; ++i) {
    const CoverageMatrix c = compute_coverage({}, gue, area, cfg, geom, 1000 + i);
    near_cov += c.cov_gm(0, 0) ? 1 : 0;
    far_cov += c.cov_gm(1, 0) ? 1 : 0;
  }
  CHECK(near_cov > far_cov);
}
