#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uabsim/rng.hpp"
#include "uabsim/scenario.hpp"

namespace uabsim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct PathLossCoeffs {
  double intercept_db = 0.0;
  double slope_dist = 0.0;   // multiplies log10(d3d)
  double slope_freq = 0.0;   // multiplies log10(f_c GHz)
  double height_coeff = 0.0; // multiplies (h_ut - 1.5)
};

struct LinkBudgetConfig {
  double f_c_ghz = 30.0;
  double p_tx_dbm = 14.0;
  double g_tx_db = 0.0;
  double p_noise_dbm = -106.0;
  double sigma_los_db = 4.0;
  double sigma_nlos_db = 6.0;
  double sinr_th_db = 0.0;
  PathLossCoeffs los{28.0, 22.0, 20.0, 0.0};
  PathLossCoeffs nlos{13.54, 39.08, 20.0, -0.6};
  double h_ut_m = 1.5;            // ground-user antenna height
  double mbs_height_m = 25.0;
  double mbs_rx_gain_db = 23.0;   // MBS directional receive gain
  double aerial_los_floor = 0.9;  // LoS probability floor for UABS-GUE links
  double backhaul_gain_db = 20.0; // extra directional gain on UABS-MBS links
  // Per-RU rate dimensioning: r = B_RU * log2(1 + SINR) * (T_slot / delta_t).
  double b_ru_hz = 180e3;
  double t_slot_s = 1e-3;
  double delta_t_s = 10.0;

  void validate() const {
    if (f_c_ghz <= 0.0) throw std::invalid_argument("f_c must be positive");
    if (sigma_los_db < 0.0 || sigma_nlos_db < 0.0) {
      throw std::invalid_argument("shadowing deviations must be non-negative");
    }
  }
};

// UABS footprint: square of side 2*h*tan(fov/2) under the drone, split into
// a 3x3 grid of non-overlapping beam circles of radius side/6.
struct BeamGeometry {
  double fov_deg = 100.0;
  int n_beam = 9;
  double altitude_m = 100.0;

  double footprint_side() const {
    return 2.0 * altitude_m * std::tan(fov_deg * std::numbers::pi / 360.0);
  }
  double beam_radius() const { return footprint_side() / 6.0; }

  // Offsets of the 9 beam centers from the ground projection, row-major.
  std::vector<Point> beam_centers() const {
    const double cell = footprint_side() / 3.0;
    std::vector<Point> centers;
    centers.reserve(9);
    for (int r = -1; r <= 1; ++r) {
      for (int c = -1; c <= 1; ++c) {
        centers.push_back({c * cell, r * cell});
      }
    }
    return centers;
  }

  // Index of the beam whose circle contains the ground point, or -1.
  int beam_index(const Point& uabs_ground, const Point& p) const {
    const auto centers = beam_centers();
    const double radius = beam_radius();
    for (int j = 0; j < static_cast<int>(centers.size()); ++j) {
      const Point c{uabs_ground.x + centers[j].x, uabs_ground.y + centers[j].y};
      if (distance(c, p) <= radius) return j;
    }
    return -1;
  }
};

// Ideal-beam receive gain in dB from the per-beam solid angle.
inline double beam_gain(double fov_deg, int n_beam) {
  if (fov_deg <= 0.0 || fov_deg > 180.0 || n_beam < 1) {
    throw std::invalid_argument("invalid beam parameters");
  }
  const double fov_rad = fov_deg * std::numbers::pi / 180.0;
  const double solid = 2.0 * std::numbers::pi * (1.0 - std::cos(fov_rad / 2.0));
  const double per_beam = solid / n_beam;
  const double per_beam_deg = per_beam * 360.0 / (2.0 * std::numbers::pi);
  return linear_to_db(41000.0 / (per_beam_deg * per_beam_deg));
}

inline double path_loss(double d3d_m, bool is_los, const LinkBudgetConfig& cfg) {
  if (d3d_m <= 0.0) throw std::invalid_argument("degenerate geometry");
  const PathLossCoeffs& c = is_los ? cfg.los : cfg.nlos;
  return c.intercept_db + c.slope_dist * std::log10(d3d_m) +
         c.slope_freq * std::log10(cfg.f_c_ghz) +
         c.height_coeff * (cfg.h_ut_m - 1.5);
}

// Distance-decaying terrestrial LoS probability.
inline double los_probability(double d2d_m) {
  if (d2d_m <= 0.0) return 1.0;
  const double decay = std::exp(-d2d_m / 63.0);
  return std::min(18.0 / d2d_m, 1.0) * (1.0 - decay) + decay;
}

// SINR computed in the linear domain, returned in dB.
inline double sinr_db(double p_rx_dbm, const std::vector<double>& interferer_rx_dbm,
                      double p_noise_dbm) {
  double denom = db_to_linear(p_noise_dbm);
  for (double i : interferer_rx_dbm) denom += db_to_linear(i);
  return linear_to_db(db_to_linear(p_rx_dbm) / denom);
}

// Coverage, beam membership, potential interference, and per-RU rates for
// one timestep's geometry.
struct CoverageMatrix {
  int n_g = 0, n_u = 0, n_m = 1, n_beam = 9;
  std::vector<char> c_gm;   // [g*n_m + m]
  std::vector<char> c_gu;   // [g*n_u + u]
  std::vector<char> k_gj;   // [(g*n_u + u)*n_beam + j]
  std::vector<char> i_gmu;  // [(g*n_m + m)*n_u + u]
  std::vector<char> i_gum;  // [(g*n_u + u)*n_m + m]
  std::vector<double> r_gm;    // bits/s per RU
  std::vector<double> r_gu;
  std::vector<double> r_um;    // [u*n_m + m]
  std::vector<double> ri_gmu;  // interference-limited, worst single interferer
  std::vector<double> ri_gum;

  char cov_gm(int g, int m) const { return c_gm[g * n_m + m]; }
  char cov_gu(int g, int u) const { return c_gu[g * n_u + u]; }
  char beam(int g, int u, int j) const { return k_gj[(g * n_u + u) * n_beam + j]; }
  int beam_of(int g, int u) const {
    for (int j = 0; j < n_beam; ++j) {
      if (beam(g, u, j)) return j;
    }
    return -1;
  }
  char pot_mu(int g, int m, int u) const { return i_gmu[(g * n_m + m) * n_u + u]; }
  char pot_um(int g, int u, int m) const { return i_gum[(g * n_u + u) * n_m + m]; }
  double rate_gm(int g, int m) const { return r_gm[g * n_m + m]; }
  double rate_gu(int g, int u) const { return r_gu[g * n_u + u]; }
  double rate_um(int u, int m) const { return r_um[u * n_m + m]; }
  double rate_i_gmu(int g, int m, int u) const { return ri_gmu[(g * n_m + m) * n_u + u]; }
  double rate_i_gum(int g, int u, int m) const { return ri_gum[(g * n_u + u) * n_m + m]; }

  void resize(int g, int u, int m, int beams) {
    n_g = g;
    n_u = u;
    n_m = m;
    n_beam = beams;
    c_gm.assign(static_cast<size_t>(g) * m, 0);
    c_gu.assign(static_cast<size_t>(g) * u, 0);
    k_gj.assign(static_cast<size_t>(g) * u * beams, 0);
    i_gmu.assign(static_cast<size_t>(g) * m * u, 0);
    i_gum.assign(static_cast<size_t>(g) * u * m, 0);
    r_gm.assign(static_cast<size_t>(g) * m, 0.0);
    r_gu.assign(static_cast<size_t>(g) * u, 0.0);
    r_um.assign(static_cast<size_t>(u) * m, 0.0);
    ri_gmu.assign(static_cast<size_t>(g) * m * u, 0.0);
    ri_gum.assign(static_cast<size_t>(g) * u * m, 0.0);
  }
};

namespace detail {

inline double shannon_rate_per_ru(double sinr_db_value, const LinkBudgetConfig& cfg) {
  const double se = std::log2(1.0 + db_to_linear(sinr_db_value));
  return cfg.b_ru_hz * se * (cfg.t_slot_s / cfg.delta_t_s);
}

}  // namespace detail

// Fills the full coverage matrix for one timestep. LoS states and shadowing
// are drawn per link from the given seed; coverage itself uses the
// interference-free SNR against sinr_th, interference is handled by the RRM.
inline CoverageMatrix compute_coverage(const std::vector<Point>& uabs_positions,
                                       const std::vector<Point>& gue_positions,
                                       const ServiceArea& area,
                                       const LinkBudgetConfig& cfg,
                                       const BeamGeometry& geom,
                                       std::uint64_t seed) {
  cfg.validate();
  const int n_g = static_cast<int>(gue_positions.size());
  const int n_u = static_cast<int>(uabs_positions.size());
  const int n_m = 1;
  CoverageMatrix cov;
  cov.resize(n_g, n_u, n_m, geom.n_beam);

  const double gain_uabs = beam_gain(geom.fov_deg, geom.n_beam);

  // received power per (GUE, MBS) and (GUE, UABS) link
  std::vector<double> prx_gm(static_cast<size_t>(n_g) * n_m,
                             -std::numeric_limits<double>::infinity());
  std::vector<double> prx_gu(static_cast<size_t>(n_g) * n_u,
                             -std::numeric_limits<double>::infinity());

  for (int g = 0; g < n_g; ++g) {
    Rng rng(mix_seed(seed, 0xcafeu + static_cast<std::uint64_t>(g)));
    // MBS link
    {
      const double d2d = std::max(distance(gue_positions[g], area.mbs_position), 0.1);
      const double dh = cfg.mbs_height_m - cfg.h_ut_m;
      const double d3d = std::sqrt(d2d * d2d + dh * dh);
      const bool los = rng.bernoulli(los_probability(d2d));
      const double shadow = rng.normal(0.0, los ? cfg.sigma_los_db : cfg.sigma_nlos_db);
      const double pl = path_loss(d3d, los, cfg) + shadow;
      const double prx = cfg.p_tx_dbm + cfg.g_tx_db + cfg.mbs_rx_gain_db - pl;
      prx_gm[g * n_m] = prx;
      const double snr = sinr_db(prx, {}, cfg.p_noise_dbm);
      if (snr >= cfg.sinr_th_db) {
        cov.c_gm[g * n_m] = 1;
        cov.r_gm[g * n_m] = detail::shannon_rate_per_ru(snr, cfg);
      }
    }
    // UABS links: worst-case ideal beams, 0 dB (disconnected) outside
    for (int u = 0; u < n_u; ++u) {
      const int j = geom.beam_index(uabs_positions[u], gue_positions[g]);
      if (j < 0) continue;
      const double d2d = std::max(distance(gue_positions[g], uabs_positions[u]), 0.1);
      const double dh = geom.altitude_m - cfg.h_ut_m;
      const double d3d = std::sqrt(d2d * d2d + dh * dh);
      const bool los = rng.bernoulli(
          std::max(los_probability(d2d), cfg.aerial_los_floor));
      const double shadow = rng.normal(0.0, los ? cfg.sigma_los_db : cfg.sigma_nlos_db);
      const double pl = path_loss(d3d, los, cfg) + shadow;
      const double prx = cfg.p_tx_dbm + cfg.g_tx_db + gain_uabs - pl;
      prx_gu[g * n_u + u] = prx;
      const double snr = sinr_db(prx, {}, cfg.p_noise_dbm);
      if (snr >= cfg.sinr_th_db) {
        cov.c_gu[g * n_u + u] = 1;
        cov.k_gj[(g * n_u + u) * geom.n_beam + j] = 1;
        cov.r_gu[g * n_u + u] = detail::shannon_rate_per_ru(snr, cfg);
      }
    }
  }

  // Backhaul rates: UABS-MBS, aerial LoS with directional gain on both ends.
  for (int u = 0; u < n_u; ++u) {
    const double d2d = std::max(distance(uabs_positions[u], area.mbs_position), 0.1);
    const double dh = geom.altitude_m - cfg.mbs_height_m;
    const double d3d = std::sqrt(d2d * d2d + dh * dh);
    const double pl = path_loss(d3d, true, cfg);
    const double prx =
        cfg.p_tx_dbm + cfg.backhaul_gain_db + cfg.mbs_rx_gain_db - pl;
    const double snr = sinr_db(prx, {}, cfg.p_noise_dbm);
    if (snr >= cfg.sinr_th_db) {
      cov.r_um[u * n_m] = detail::shannon_rate_per_ru(snr, cfg);
    }
  }

  // Potential interference: g in range of both BSs.
  for (int g = 0; g < n_g; ++g) {
    for (int u = 0; u < n_u; ++u) {
      if (cov.cov_gm(g, 0) && cov.cov_gu(g, u)) {
        cov.i_gmu[(g * n_m) * n_u + u] = 1;
        cov.i_gum[(g * n_u + u) * n_m] = 1;
      }
    }
  }

  // Interference-limited rates: worst-case single interferer, taken as the
  // strongest received power at the victim BS among users coverable by the
  // other BS.
  for (int g = 0; g < n_g; ++g) {
    for (int u = 0; u < n_u; ++u) {
      // transmission g -> m, victim m, interferer served under u
      if (cov.cov_gm(g, 0)) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int g2 = 0; g2 < n_g; ++g2) {
          if (g2 != g && cov.cov_gu(g2, u)) worst = std::max(worst, prx_gm[g2 * n_m]);
        }
        const double s =
            std::isinf(worst)
                ? sinr_db(prx_gm[g * n_m], {}, cfg.p_noise_dbm)
                : sinr_db(prx_gm[g * n_m], {worst}, cfg.p_noise_dbm);
        cov.ri_gmu[(g * n_m) * n_u + u] =
            s >= cfg.sinr_th_db ? detail::shannon_rate_per_ru(s, cfg) : 0.0;
      }
      // transmission g -> u, victim u, interferer served under m
      if (cov.cov_gu(g, u)) {
        double worst = -std::numeric_limits<double>::infinity();
        for (int g2 = 0; g2 < n_g; ++g2) {
          if (g2 != g && cov.cov_gm(g2, 0) && cov.cov_gu(g2, u)) {
            worst = std::max(worst, prx_gu[g2 * n_u + u]);
          }
        }
        const double s =
            std::isinf(worst)
                ? sinr_db(prx_gu[g * n_u + u], {}, cfg.p_noise_dbm)
                : sinr_db(prx_gu[g * n_u + u], {worst}, cfg.p_noise_dbm);
        cov.ri_gum[(g * n_u + u) * n_m] =
            s >= cfg.sinr_th_db ? detail::shannon_rate_per_ru(s, cfg) : 0.0;
      }
    }
  }
  return cov;
}

}  // namespace uabsim
