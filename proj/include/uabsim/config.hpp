#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uabsim/env.hpp"
#include "uabsim/explore.hpp"
#include "uabsim/radio.hpp"
#include "uabsim/scenario.hpp"

namespace uabsim {

// One compared learning strategy.
struct Strategy {
  enum class Kind { kMamo, kMama, kEpsGreedy, kGeneralized } kind = Kind::kMamo;
  double eps_i_frac = 0.6;  // per-strategy decay override (eps-greedy variants)

  bool uses_advisor() const { return kind == Kind::kMamo || kind == Kind::kMama; }
  bool override_enabled() const { return kind == Kind::kMamo; }

  std::string name() const {
    switch (kind) {
      case Kind::kMamo: return "mamo";
      case Kind::kMama: return "mama";
      case Kind::kEpsGreedy: {
        std::string s = std::to_string(eps_i_frac);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return "eps_greedy_" + s;
      }
      case Kind::kGeneralized: return "generalized";
    }
    return "?";
  }

  static Strategy parse(const std::string& text, double default_eps_frac) {
    Strategy s;
    if (text == "mamo") {
      s.kind = Kind::kMamo;
    } else if (text == "mama") {
      s.kind = Kind::kMama;
    } else if (text == "generalized") {
      s.kind = Kind::kGeneralized;
    } else if (text.rfind("eps_greedy", 0) == 0) {
      s.kind = Kind::kEpsGreedy;
      const auto colon = text.find(':');
      s.eps_i_frac = colon == std::string::npos ? default_eps_frac
                                                : std::stod(text.substr(colon + 1));
    } else {
      throw std::invalid_argument("unknown strategy: " + text);
    }
    if (s.kind == Kind::kEpsGreedy || s.kind == Kind::kGeneralized) {
      if (text.find(':') == std::string::npos) s.eps_i_frac = default_eps_frac;
    }
    return s;
  }
};

struct AreaSpec {
  int id = 0;
  int gue_count = 0;
};

// Full experiment description. Key names follow the simulation-parameter
// table of the reference setup where one exists.
struct ExperimentConfig {
  // fleet and mission
  double v = 20.0;      // UABS speed, m/s
  double h = 100.0;     // UABS altitude, m
  double phi = 100.0;   // field of view, degrees
  double T = 270.0;     // mission duration, s
  double T_s = 10.0;    // step duration, s
  int fleet_size = 3;   // |U|
  // radio
  double f_c = 30.0;        // GHz
  double P_tx = 14.0;       // dBm
  double G_tx = 0.0;        // dB
  double G_rx = 23.0;       // dB, MBS receive gain
  double P_n = -106.0;      // dBm
  double sinr_th = 0.0;     // dB
  double sigma_los = 4.0;   // dB
  double sigma_nlos = 6.0;  // dB
  int n_beam = 9;
  // learning
  double eps_mu_frac = 0.2;
  double eps_i_frac = 0.6;
  double eps_min = 0.05;
  std::uint64_t K_i = 50000;
  std::uint64_t K_mu = 1000000;
  int k = 128;          // batch size
  int Y = 100;          // target sync period
  double gamma = 0.99;
  int J = 2700;         // advisor updates per episode round
  int N = 1000;         // training episodes
  double alpha = 1e-4;  // learning rate
  int trunk_width = 128;
  int head_width = 64;
  // scenario
  double D = 1e6;    // demand per packet, bits
  double L = 1500.0; // area length, m
  double W = 700.0;  // area width, m
  double v_gue = 14.0;
  int N_w = 9;            // service window, steps
  int ru_budget = 50;     // RU budget per BS per period (desk-scale W)
  std::vector<AreaSpec> areas{{0, 200}, {1, 180}, {2, 90}};
  std::vector<std::vector<Point>> takeoff_sets;
  // orchestration
  std::vector<std::string> strategies{"mamo", "mama", "eps_greedy:0.2",
                                      "eps_greedy:0.6", "generalized"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int checkpoint_interval = 50;
  int n_hat_s = 3;
  bool parallel = true;

  int t_steps() const { return static_cast<int>(T / T_s); }

  LinkBudgetConfig radio_config() const {
    LinkBudgetConfig r;
    r.f_c_ghz = f_c;
    r.p_tx_dbm = P_tx;
    r.g_tx_db = G_tx;
    r.mbs_rx_gain_db = G_rx;
    r.p_noise_dbm = P_n;
    r.sinr_th_db = sinr_th;
    r.sigma_los_db = sigma_los;
    r.sigma_nlos_db = sigma_nlos;
    r.delta_t_s = T_s;
    return r;
  }

  BeamGeometry beam_geometry() const { return BeamGeometry{phi, n_beam, h}; }

  EnvConfig env_config(int gue_count) const {
    EnvConfig e;
    e.uabs_speed = v;
    e.delta_t = T_s;
    e.t_steps = t_steps();
    e.n_w = N_w;
    e.ru_budget = ru_budget;
    e.demand_bits = D;
    e.per_beam_scale = static_cast<double>(gue_count) * N_w;
    return e;
  }

  std::vector<ServiceArea> build_areas() const {
    std::vector<ServiceArea> out;
    for (const auto& spec : areas) {
      out.push_back(make_area(spec.id, L, W, spec.gue_count));
    }
    return out;
  }

  std::vector<Strategy> parsed_strategies() const {
    std::vector<Strategy> out;
    for (const auto& s : strategies) out.push_back(Strategy::parse(s, eps_i_frac));
    return out;
  }

  void validate() const {
    if (fleet_size < 0) throw std::invalid_argument("fleet_size must be >= 0");
    if (T_s <= 0.0 || T <= 0.0) throw std::invalid_argument("T and T_s must be positive");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (k < 1) throw std::invalid_argument("batch size k must be >= 1");
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma in (0,1)");
    if (ru_budget < 1) throw std::invalid_argument("ru_budget must be >= 1");
    if (areas.empty()) throw std::invalid_argument("at least one area required");
    if (takeoff_sets.empty()) throw std::invalid_argument("at least one takeoff set");
    for (const auto& set : takeoff_sets) {
      if (static_cast<int>(set.size()) != fleet_size) {
        throw std::invalid_argument("takeoff tuple size must equal fleet_size");
      }
    }
    EpsilonSchedule{eps_min, eps_i_frac, N}.validate();
    EpsilonSchedule{eps_min, eps_mu_frac, N}.validate();
    (void)parsed_strategies();
    radio_config().validate();
  }
};

// Table-default profile at full scale: 3 areas x 5 takeoff settings.
inline ExperimentConfig full_profile() {
  ExperimentConfig cfg;
  const double L = cfg.L, W = cfg.W;
  const Point xi1{0, 0}, xi2{L, 0}, xi3{0, W}, xi4{L, W}, xi5{L / 2, W / 2},
      xi6{L / 4, 3 * W / 4}, xi7{3 * L / 4, W / 4}, xi8{3 * L / 4, 3 * W / 4};
  cfg.takeoff_sets = {{xi1, xi2, xi4}, {xi1, xi3, xi4}, {xi1, xi4, xi5},
                      {xi2, xi3, xi5}, {xi6, xi7, xi8}};
  return cfg;
}

// Reduced profile sized for a workstation: 2 areas x 2 takeoff settings,
// smaller populations, shorter training, scaled demand and RU budget.
inline ExperimentConfig desk_profile() {
  ExperimentConfig cfg;
  cfg.areas = {{0, 20}, {1, 18}};
  cfg.N = 200;
  cfg.ru_budget = 20;
  cfg.D = 6000.0;
  cfg.fleet_size = 5;
  cfg.k = 64;
  cfg.K_i = 20000;
  cfg.K_mu = 100000;
  cfg.J = 54;
  cfg.Y = 100;
  cfg.trunk_width = 64;
  cfg.head_width = 32;
  cfg.alpha = 5e-4;
  const double L = cfg.L, W = cfg.W;
  // One interior tuple spread across the area and one corner-plus-center
  // tuple; a larger fleet keeps the reduced populations coverable.
  cfg.takeoff_sets = {{Point{0.1 * L, 0.2 * W}, Point{0.25 * L, 0.8 * W},
                       Point{0.75 * L, 0.2 * W}, Point{0.75 * L, 0.8 * W},
                       Point{0.9 * L, 0.4 * W}},
                      {Point{0, 0}, Point{L, 0}, Point{L, W}, Point{0, W},
                       Point{L / 2, W / 2}}};
  return cfg;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::set<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::invalid_argument("unknown config key: " + it.key());
    }
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("profile")) {
    const std::string p = j.at("profile").get<std::string>();
    if (p == "desk") cfg = desk_profile();
    else if (p == "full") cfg = full_profile();
    else throw std::invalid_argument("unknown profile: " + p);
  } else {
    cfg = desk_profile();
  }
  static const std::set<std::string> known{
      "profile",      "v",          "h",           "phi",        "T",
      "T_s",          "fleet_size", "f_c",         "P_tx",       "G_tx",
      "G_rx",         "P_n",        "sinr_th",     "sigma_los",  "sigma_nlos",
      "n_beam",       "eps_mu_frac", "eps_i_frac", "eps_min",    "K_i",
      "K_mu",         "k",          "Y",           "gamma",      "J",
      "N",            "alpha",      "trunk_width", "head_width", "D",
      "L",            "W",          "v_gue",       "N_w",        "ru_budget",
      "areas",        "takeoff_sets", "strategies", "seeds",
      "checkpoint_interval", "n_hat_s", "parallel"};
  detail::reject_unknown_keys(j, known);

  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
  };
  get("v", cfg.v);
  get("h", cfg.h);
  get("phi", cfg.phi);
  get("T", cfg.T);
  get("T_s", cfg.T_s);
  get("fleet_size", cfg.fleet_size);
  get("f_c", cfg.f_c);
  get("P_tx", cfg.P_tx);
  get("G_tx", cfg.G_tx);
  get("G_rx", cfg.G_rx);
  get("P_n", cfg.P_n);
  get("sinr_th", cfg.sinr_th);
  get("sigma_los", cfg.sigma_los);
  get("sigma_nlos", cfg.sigma_nlos);
  get("n_beam", cfg.n_beam);
  get("eps_mu_frac", cfg.eps_mu_frac);
  get("eps_i_frac", cfg.eps_i_frac);
  get("eps_min", cfg.eps_min);
  get("K_i", cfg.K_i);
  get("K_mu", cfg.K_mu);
  get("k", cfg.k);
  get("Y", cfg.Y);
  get("gamma", cfg.gamma);
  get("J", cfg.J);
  get("N", cfg.N);
  get("alpha", cfg.alpha);
  get("trunk_width", cfg.trunk_width);
  get("head_width", cfg.head_width);
  get("D", cfg.D);
  get("L", cfg.L);
  get("W", cfg.W);
  get("v_gue", cfg.v_gue);
  get("N_w", cfg.N_w);
  get("ru_budget", cfg.ru_budget);
  get("checkpoint_interval", cfg.checkpoint_interval);
  get("n_hat_s", cfg.n_hat_s);
  get("parallel", cfg.parallel);
  get("strategies", cfg.strategies);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("areas")) {
    cfg.areas.clear();
    for (const auto& a : j.at("areas")) {
      detail::reject_unknown_keys(a, {"id", "gue_count"});
      cfg.areas.push_back({a.at("id").get<int>(), a.at("gue_count").get<int>()});
    }
  }
  if (j.contains("takeoff_sets")) {
    cfg.takeoff_sets.clear();
    for (const auto& set : j.at("takeoff_sets")) {
      std::vector<Point> points;
      for (const auto& p : set) {
        points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      cfg.takeoff_sets.push_back(std::move(points));
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace uabsim
