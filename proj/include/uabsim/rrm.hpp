#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uabsim/radio.hpp"

namespace uabsim {

// Total RUs schedulable within one RRM period.
inline long long compute_ru_budget(double b_sys_hz, double delta_f_hz, int n_sub,
                                   double delta_t_s, double t_slot_s) {
  if (b_sys_hz <= 0.0 || delta_f_hz <= 0.0 || n_sub <= 0 || delta_t_s <= 0.0 ||
      t_slot_s <= 0.0) {
    throw std::invalid_argument("RU budget inputs must be positive");
  }
  const double b_ru = delta_f_hz * n_sub;
  return static_cast<long long>(std::floor((b_sys_hz / b_ru) * (delta_t_s / t_slot_s)));
}

struct RRMInstance {
  CoverageMatrix cov;
  std::vector<int> priorities;   // p_g, >= 1
  std::vector<double> demands;   // D_g, bits
  int ru_budget = 50;            // W, per BS per period
  double delta_t_s = 10.0;

  int n_g() const { return cov.n_g; }
  int n_u() const { return cov.n_u; }
  int n_m() const { return cov.n_m; }
};

inline RRMInstance build_instance(const CoverageMatrix& cov,
                                  const std::vector<int>& priorities,
                                  const std::vector<double>& demands, int ru_budget,
                                  double delta_t_s = 10.0) {
  if (static_cast<int>(priorities.size()) != cov.n_g ||
      static_cast<int>(demands.size()) != cov.n_g) {
    throw std::invalid_argument("instance dimension mismatch");
  }
  if (ru_budget < 1) throw std::invalid_argument("ru_budget must be >= 1");
  for (int p : priorities) {
    if (p < 1) throw std::invalid_argument("priorities must be >= 1");
  }
  for (double d : demands) {
    if (d <= 0.0) throw std::invalid_argument("demands must be positive");
  }
  return RRMInstance{cov, priorities, demands, ru_budget, delta_t_s};
}

struct RRMSolution {
  int n_g = 0, n_u = 0, n_m = 1, n_beam = 9;
  std::vector<char> lambda_gm, lambda_gu;  // association
  std::vector<char> lambda_um;             // backhaul activation [u*n_m+m]
  std::vector<int> w_gm, w_gu;             // RU allocations
  std::vector<int> w_um;                   // backhaul RUs
  std::vector<char> e_j;                   // beam activation [u*n_beam+j]
  std::vector<char> iota_mu;               // [m*n_u+u]
  std::vector<char> iota_um;               // [u*n_m+m]
  std::vector<char> iota_gmu;              // [(g*n_m+m)*n_u+u]
  std::vector<char> iota_gum;              // [(g*n_u+u)*n_m+m]
  std::vector<char> psi_g, psi_gm, psi_gu;
  long long objective_value = 0;

  void resize(int g, int u, int m, int beams) {
    n_g = g;
    n_u = u;
    n_m = m;
    n_beam = beams;
    lambda_gm.assign(static_cast<size_t>(g) * m, 0);
    lambda_gu.assign(static_cast<size_t>(g) * u, 0);
    lambda_um.assign(static_cast<size_t>(u) * m, 0);
    w_gm.assign(static_cast<size_t>(g) * m, 0);
    w_gu.assign(static_cast<size_t>(g) * u, 0);
    w_um.assign(static_cast<size_t>(u) * m, 0);
    e_j.assign(static_cast<size_t>(u) * beams, 0);
    iota_mu.assign(static_cast<size_t>(m) * u, 0);
    iota_um.assign(static_cast<size_t>(u) * m, 0);
    iota_gmu.assign(static_cast<size_t>(g) * m * u, 0);
    iota_gum.assign(static_cast<size_t>(g) * u * m, 0);
    psi_g.assign(g, 0);
    psi_gm.assign(static_cast<size_t>(g) * m, 0);
    psi_gu.assign(static_cast<size_t>(g) * u, 0);
    objective_value = 0;
  }
};

struct ConstraintResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<ConstraintResult> constraints;
  std::string first_violation;

  void add(const std::string& name, bool pass, const std::string& detail = "") {
    constraints.push_back({name, pass, detail});
    if (!pass) {
      feasible = false;
      if (first_violation.empty()) first_violation = name + (detail.empty() ? "" : " " + detail);
    }
  }
};

// Checks every ILP constraint directly from the instance data, independently
// of both solvers.
inline FeasibilityReport verify_feasibility(const RRMInstance& inst,
                                            const RRMSolution& sol) {
  const auto& cov = inst.cov;
  const int G = cov.n_g, U = cov.n_u, M = cov.n_m, B = cov.n_beam;
  const int W = inst.ru_budget;
  const double dt = inst.delta_t_s;
  FeasibilityReport rep;
  if (sol.n_g != G || sol.n_u != U || sol.n_m != M) {
    rep.add("dimensions", false, "solution/instance shape mismatch");
    return rep;
  }
  auto idx_gm = [&](int g, int m) { return g * M + m; };
  auto idx_gu = [&](int g, int u) { return g * U + u; };
  auto idx_um = [&](int u, int m) { return u * M + m; };
  auto idx_gmu = [&](int g, int m, int u) { return (g * M + m) * U + u; };
  auto idx_gum = [&](int g, int u, int m) { return (g * U + u) * M + m; };
  const double tol = 1e-9;

  // (u:demand)
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      double lhs = 0.0;
      for (int m = 0; m < M; ++m) lhs += sol.w_gm[idx_gm(g, m)] * cov.rate_gm(g, m) * dt;
      for (int u = 0; u < U; ++u) {
        const int j = cov.beam_of(g, u);
        if (j >= 0) lhs += sol.w_gu[idx_gu(g, u)] * cov.rate_gu(g, u) * dt;
      }
      if (lhs + tol < sol.psi_g[g] * inst.demands[g]) {
        ok = false;
        det = "g=" + std::to_string(g);
      }
    }
    rep.add("demand", ok, det);
  }
  // (u:demand-sinr-um)
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      for (int u = 0; u < U && ok; ++u) {
        for (int m = 0; m < M && ok; ++m) {
          double lhs = 0.0;
          for (int m2 = 0; m2 < M; ++m2) {
            lhs += sol.w_gm[idx_gm(g, m2)] * cov.rate_i_gmu(g, m2, u) * dt;
          }
          for (int u2 = 0; u2 < U; ++u2) {
            if (cov.beam_of(g, u2) >= 0) {
              lhs += sol.w_gu[idx_gu(g, u2)] * cov.rate_i_gum(g, u2, m) * dt;
            }
          }
          double rhs = 0.0;
          for (int m2 = 0; m2 < M; ++m2) rhs += sol.iota_gmu[idx_gmu(g, m2, u)];
          for (int u2 = 0; u2 < U; ++u2) rhs += sol.iota_gum[idx_gum(g, u2, m)];
          rhs *= inst.demands[g];
          if (lhs + tol < rhs) {
            ok = false;
            det = "g=" + std::to_string(g) + " u=" + std::to_string(u) +
                  " m=" + std::to_string(m);
          }
        }
      }
    }
    rep.add("demand_sinr_um", ok, det);
  }
  // (u:res_limit_mbs)
  {
    bool ok = true;
    std::string det;
    for (int m = 0; m < M && ok; ++m) {
      long long total = 0;
      for (int g = 0; g < G; ++g) total += sol.w_gm[idx_gm(g, m)];
      for (int u = 0; u < U; ++u) total += sol.w_um[idx_um(u, m)];
      if (total > W) {
        ok = false;
        det = "m=" + std::to_string(m);
      }
    }
    rep.add("res_limit_mbs", ok, det);
  }
  // (u:res_limit_uabs), per beam j
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      long long backhaul = 0;
      for (int m = 0; m < M; ++m) backhaul += sol.w_um[idx_um(u, m)];
      for (int j = 0; j < B && ok; ++j) {
        long long total = backhaul;
        for (int g = 0; g < G; ++g) {
          if (cov.beam(g, u, j)) total += sol.w_gu[idx_gu(g, u)];
        }
        if (total > W) {
          ok = false;
          det = "u=" + std::to_string(u) + " j=" + std::to_string(j);
        }
      }
    }
    rep.add("res_limit_uabs", ok, det);
  }
  // (u:capacity_backhaul)
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      double lhs = 0.0;
      for (int g = 0; g < G; ++g) {
        if (cov.beam_of(g, u) >= 0) lhs += sol.w_gu[idx_gu(g, u)] * cov.rate_gu(g, u);
      }
      double rhs = 0.0;
      for (int m = 0; m < M; ++m) rhs += cov.rate_um(u, m) * sol.w_um[idx_um(u, m)];
      if (lhs > rhs + tol) {
        ok = false;
        det = "u=" + std::to_string(u);
      }
    }
    rep.add("capacity_backhaul", ok, det);
  }
  // (u:beam_uabs_lim)
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      int active = 0;
      for (int j = 0; j < B; ++j) active += sol.e_j[u * B + j];
      if (active > B) {
        ok = false;
        det = "u=" + std::to_string(u);
      }
    }
    rep.add("beam_uabs_lim", ok, det);
  }
  // (u:beam_uabs_lim2)
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      for (int j = 0; j < B && ok; ++j) {
        long long total = 0;
        for (int g = 0; g < G; ++g) {
          if (cov.beam(g, u, j)) total += sol.w_gu[idx_gu(g, u)];
        }
        if (total > static_cast<long long>(sol.e_j[u * B + j]) * W) {
          ok = false;
          det = "u=" + std::to_string(u) + " j=" + std::to_string(j);
        }
      }
    }
    rep.add("beam_uabs_lim2", ok, det);
  }
  // (u:one_base)
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      int total = 0;
      for (int m = 0; m < M; ++m) total += sol.lambda_gm[idx_gm(g, m)];
      for (int u = 0; u < U; ++u) total += sol.lambda_gu[idx_gu(g, u)];
      if (total > 1) {
        ok = false;
        det = "g=" + std::to_string(g);
      }
    }
    rep.add("one_base", ok, det);
  }
  // (u:one_base_mbs) / (u:one_base_uabs)
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      for (int m = 0; m < M && ok; ++m) {
        if (sol.w_gm[idx_gm(g, m)] > sol.lambda_gm[idx_gm(g, m)] * W) {
          ok = false;
          det = "g=" + std::to_string(g) + " m=" + std::to_string(m);
        }
      }
    }
    rep.add("one_base_mbs", ok, det);
    ok = true;
    det.clear();
    for (int g = 0; g < G && ok; ++g) {
      for (int u = 0; u < U && ok; ++u) {
        if (sol.w_gu[idx_gu(g, u)] > sol.lambda_gu[idx_gu(g, u)] * W) {
          ok = false;
          det = "g=" + std::to_string(g) + " u=" + std::to_string(u);
        }
      }
    }
    rep.add("one_base_uabs", ok, det);
  }
  // (u:interf-u-on-m): iota_mu >= lambda_gu for every g with I_gum = 1
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      for (int m = 0; m < M && ok; ++m) {
        for (int g = 0; g < G && ok; ++g) {
          if (cov.pot_um(g, u, m) && sol.lambda_gu[idx_gu(g, u)] &&
              !sol.iota_mu[m * U + u]) {
            ok = false;
            det = "m=" + std::to_string(m) + " u=" + std::to_string(u);
          }
        }
      }
    }
    rep.add("interf_u_on_m", ok, det);
  }
  // (u:interf-m-on-u): iota_um >= lambda_gm for every g with I_gmu = 1
  {
    bool ok = true;
    std::string det;
    for (int u = 0; u < U && ok; ++u) {
      for (int m = 0; m < M && ok; ++m) {
        for (int g = 0; g < G && ok; ++g) {
          if (cov.pot_mu(g, m, u) && sol.lambda_gm[idx_gm(g, m)] &&
              !sol.iota_um[idx_um(u, m)]) {
            ok = false;
            det = "u=" + std::to_string(u) + " m=" + std::to_string(m);
          }
        }
      }
    }
    rep.add("interf_m_on_u", ok, det);
  }
  // (u:interf-u-on-gm): iota_gmu >= lambda_gm + iota_mu - 1
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      for (int m = 0; m < M && ok; ++m) {
        for (int u = 0; u < U && ok; ++u) {
          if (sol.iota_gmu[idx_gmu(g, m, u)] <
              sol.lambda_gm[idx_gm(g, m)] + sol.iota_mu[m * U + u] - 1) {
            ok = false;
            det = "g=" + std::to_string(g);
          }
        }
      }
    }
    rep.add("interf_u_on_gm", ok, det);
  }
  // (u:interf-m-on-gu): iota_gum >= lambda_gu + iota_um - 1
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      for (int u = 0; u < U && ok; ++u) {
        for (int m = 0; m < M && ok; ++m) {
          if (sol.iota_gum[idx_gum(g, u, m)] <
              sol.lambda_gu[idx_gu(g, u)] + sol.iota_um[idx_um(u, m)] - 1) {
            ok = false;
            det = "g=" + std::to_string(g);
          }
        }
      }
    }
    rep.add("interf_m_on_gu", ok, det);
  }
  // psi coupling
  {
    bool ok = true;
    std::string det;
    for (int g = 0; g < G && ok; ++g) {
      for (int m = 0; m < M && ok; ++m) {
        if (sol.psi_gm[idx_gm(g, m)] != (sol.psi_g[g] && sol.lambda_gm[idx_gm(g, m)])) {
          ok = false;
          det = "g=" + std::to_string(g);
        }
      }
      for (int u = 0; u < U && ok; ++u) {
        if (sol.psi_gu[idx_gu(g, u)] != (sol.psi_g[g] && sol.lambda_gu[idx_gu(g, u)])) {
          ok = false;
          det = "g=" + std::to_string(g);
        }
      }
      if (ok && sol.psi_g[g]) {
        int total = 0;
        for (int m = 0; m < M; ++m) total += sol.lambda_gm[idx_gm(g, m)];
        for (int u = 0; u < U; ++u) total += sol.lambda_gu[idx_gu(g, u)];
        if (total == 0) {
          ok = false;
          det = "g=" + std::to_string(g) + " served without association";
        }
      }
    }
    rep.add("psi_coupling", ok, det);
  }
  // objective bookkeeping
  {
    long long obj = 0;
    for (int g = 0; g < G; ++g) {
      if (sol.psi_g[g]) obj += inst.priorities[g];
    }
    rep.add("objective_value", obj == sol.objective_value);
  }
  return rep;
}

namespace detail {

// Per-user association choice: -1 none, [0, M) MBS m, M + u for UABS u.
struct AssocView {
  const RRMInstance* inst;
  const std::vector<int>* choice;  // size G, encoded as above

  bool assoc_mbs(int g, int m) const { return (*choice)[g] == m; }
  bool assoc_uabs(int g, int u) const { return (*choice)[g] == inst->n_m() + u; }
};

// Minimal RU count for user g under the given association and realized
// iota state; returns -1 when unservable.
inline long long min_rus_for_user(const RRMInstance& inst, int g, int choice,
                                  const std::vector<char>& iota_mu,
                                  const std::vector<char>& iota_um) {
  const auto& cov = inst.cov;
  const int M = cov.n_m, U = cov.n_u;
  const double dt = inst.delta_t_s;
  const double D = inst.demands[g];
  if (choice < 0) return -1;
  if (choice < M) {
    const int m = choice;
    if (!cov.cov_gm(g, m) || cov.rate_gm(g, m) <= 0.0) return -1;
    long long w = static_cast<long long>(std::ceil(D / (cov.rate_gm(g, m) * dt) - 1e-12));
    for (int u = 0; u < U; ++u) {
      if (iota_mu[m * U + u]) {  // realized interference from u on m
        const double ri = cov.rate_i_gmu(g, m, u);
        if (ri <= 0.0) return -1;
        w = std::max(w, static_cast<long long>(std::ceil(D / (ri * dt) - 1e-12)));
      }
    }
    return std::max(w, 1LL);
  }
  const int u = choice - M;
  if (cov.beam_of(g, u) < 0 || cov.rate_gu(g, u) <= 0.0) return -1;
  long long w = static_cast<long long>(std::ceil(D / (cov.rate_gu(g, u) * dt) - 1e-12));
  for (int m = 0; m < M; ++m) {
    if (iota_um[u * M + m]) {
      const double ri = cov.rate_i_gum(g, u, m);
      if (ri <= 0.0) return -1;
      w = std::max(w, static_cast<long long>(std::ceil(D / (ri * dt) - 1e-12)));
    }
  }
  return std::max(w, 1LL);
}

// Realized iota variables implied by a full association assignment, at
// their minimal feasible values.
inline void realized_iota(const RRMInstance& inst, const std::vector<int>& choice,
                          std::vector<char>& iota_mu, std::vector<char>& iota_um) {
  const auto& cov = inst.cov;
  const int G = cov.n_g, U = cov.n_u, M = cov.n_m;
  iota_mu.assign(static_cast<size_t>(M) * U, 0);
  iota_um.assign(static_cast<size_t>(U) * M, 0);
  for (int g = 0; g < G; ++g) {
    if (choice[g] < 0) continue;
    if (choice[g] < M) {
      const int m = choice[g];
      for (int u = 0; u < U; ++u) {
        if (cov.pot_mu(g, m, u)) iota_um[u * M + m] = 1;
      }
    } else {
      const int u = choice[g] - M;
      for (int m = 0; m < M; ++m) {
        if (cov.pot_um(g, u, m)) iota_mu[m * U + u] = 1;
      }
    }
  }
}

// Assembles a full solution from a served-association assignment; returns
// false when resource, beam, or backhaul constraints cannot be met.
inline bool assemble_solution(const RRMInstance& inst, const std::vector<int>& choice,
                              RRMSolution& sol) {
  const auto& cov = inst.cov;
  const int G = cov.n_g, U = cov.n_u, M = cov.n_m, B = cov.n_beam;
  const int W = inst.ru_budget;

  std::vector<char> iota_mu, iota_um;
  realized_iota(inst, choice, iota_mu, iota_um);

  sol.resize(G, U, M, B);
  sol.iota_mu = iota_mu;
  sol.iota_um = iota_um;

  std::vector<long long> mbs_load(M, 0);
  std::vector<std::vector<long long>> beam_load(U, std::vector<long long>(B, 0));
  std::vector<double> uabs_bits(U, 0.0);  // sum of w_gu * r_gu for backhaul sizing

  for (int g = 0; g < G; ++g) {
    if (choice[g] < 0) continue;
    const long long w = min_rus_for_user(inst, g, choice[g], iota_mu, iota_um);
    if (w < 0 || w > W) return false;
    if (choice[g] < M) {
      const int m = choice[g];
      sol.lambda_gm[g * M + m] = 1;
      sol.w_gm[g * M + m] = static_cast<int>(w);
      mbs_load[m] += w;
    } else {
      const int u = choice[g] - M;
      const int j = cov.beam_of(g, u);
      sol.lambda_gu[g * U + u] = 1;
      sol.w_gu[g * U + u] = static_cast<int>(w);
      sol.e_j[u * B + j] = 1;
      beam_load[u][j] += w;
      uabs_bits[u] += static_cast<double>(w) * cov.rate_gu(g, u);
    }
    sol.psi_g[g] = 1;
    sol.objective_value += inst.priorities[g];
  }

  // Backhaul: route each UAB's aggregate through its best-rate MBS.
  for (int u = 0; u < U; ++u) {
    if (uabs_bits[u] <= 0.0) continue;
    int best_m = -1;
    double best_rate = 0.0;
    for (int m = 0; m < M; ++m) {
      if (cov.rate_um(u, m) > best_rate) {
        best_rate = cov.rate_um(u, m);
        best_m = m;
      }
    }
    if (best_m < 0) return false;
    const long long w_b =
        static_cast<long long>(std::ceil(uabs_bits[u] / best_rate - 1e-12));
    if (w_b > W) return false;
    sol.w_um[u * M + best_m] = static_cast<int>(w_b);
    sol.lambda_um[u * M + best_m] = 1;
    mbs_load[best_m] += w_b;
    // per-beam cap includes backhaul RUs
    for (int j = 0; j < B; ++j) {
      if (beam_load[u][j] + w_b > W) return false;
    }
  }
  for (int m = 0; m < M; ++m) {
    if (mbs_load[m] > W) return false;
  }
  for (int u = 0; u < U; ++u) {
    for (int j = 0; j < B; ++j) {
      if (beam_load[u][j] > W) return false;
    }
  }

  // dependent iota and psi variables
  for (int g = 0; g < G; ++g) {
    for (int m = 0; m < M; ++m) {
      for (int u = 0; u < U; ++u) {
        sol.iota_gmu[(g * M + m) * U + u] =
            sol.lambda_gm[g * M + m] && iota_mu[m * U + u];
        sol.iota_gum[(g * U + u) * M + m] =
            sol.lambda_gu[g * U + u] && iota_um[u * M + m];
      }
    }
    for (int m = 0; m < M; ++m) {
      sol.psi_gm[g * M + m] = sol.psi_g[g] && sol.lambda_gm[g * M + m];
    }
    for (int u = 0; u < U; ++u) {
      sol.psi_gu[g * U + u] = sol.psi_g[g] && sol.lambda_gu[g * U + u];
    }
  }
  return true;
}

}  // namespace detail

// Provably optimal solve via branch-and-bound over per-user served
// associations. Bound: current objective plus the priority sum of all
// still-servable remaining users.
inline RRMSolution solve_exact(const RRMInstance& inst, int exact_size_cap = 8) {
  if (inst.n_g() > exact_size_cap) {
    throw std::invalid_argument("instance above exact cap: use heuristic");
  }
  const int G = inst.n_g(), U = inst.n_u(), M = inst.n_m();

  // servable[g]: g has any coverage at all
  std::vector<long long> tail_bound(G + 1, 0);
  for (int g = G - 1; g >= 0; --g) {
    bool servable = false;
    for (int m = 0; m < M; ++m) servable |= inst.cov.cov_gm(g, m) != 0;
    for (int u = 0; u < U; ++u) servable |= inst.cov.beam_of(g, u) >= 0;
    tail_bound[g] = tail_bound[g + 1] + (servable ? inst.priorities[g] : 0);
  }

  std::vector<int> choice(G, -1);
  RRMSolution best;
  best.resize(G, U, M, inst.cov.n_beam);
  long long best_obj = 0;
  RRMSolution scratch;

  auto recurse = [&](auto&& self, int g, long long obj) -> void {
    if (obj + tail_bound[g] <= best_obj && g < G) return;  // prune
    if (g == G) {
      if (obj > best_obj && detail::assemble_solution(inst, choice, scratch)) {
        best = scratch;
        best_obj = scratch.objective_value;
      }
      return;
    }
    // try serving choices first (higher objective explored earlier)
    for (int c = 0; c < M + U; ++c) {
      choice[g] = c;
      self(self, g + 1, obj + inst.priorities[g]);
    }
    choice[g] = -1;
    self(self, g + 1, obj);
  };
  recurse(recurse, 0, 0);
  return best;
}

// Deterministic feasible heuristic: users in descending priority (ties by
// ascending id), each assigned to the candidate BS that minimizes the total
// RUs consumed system-wide. Every candidate is evaluated by reassembling
// the full solution under the interference actually realized by the current
// associations, so an idle coverage overlap never inflates anyone's
// allocation; candidates that would make an earlier assignment infeasible
// are skipped.
inline RRMSolution solve_greedy(const RRMInstance& inst) {
  const int G = inst.n_g(), U = inst.n_u(), M = inst.n_m();

  std::vector<int> order(G);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.priorities[a] != inst.priorities[b]) {
      return inst.priorities[a] > inst.priorities[b];
    }
    return a < b;
  });

  auto total_rus = [](const RRMSolution& s) {
    long long total = 0;
    for (int w : s.w_gm) total += w;
    for (int w : s.w_gu) total += w;
    for (int w : s.w_um) total += w;
    return total;
  };

  std::vector<int> choice(G, -1);
  RRMSolution best;
  best.resize(G, U, M, inst.cov.n_beam);
  RRMSolution scratch;

  for (int g : order) {
    long long best_cost = -1;
    int best_choice = -1;
    RRMSolution best_assembled;
    for (int c = 0; c < M + U; ++c) {
      choice[g] = c;
      if (!detail::assemble_solution(inst, choice, scratch)) continue;
      const long long cost = total_rus(scratch);
      if (best_choice < 0 || cost < best_cost) {
        best_cost = cost;
        best_choice = c;
        best_assembled = scratch;
      }
    }
    if (best_choice >= 0) {
      choice[g] = best_choice;
      best = std::move(best_assembled);
    } else {
      choice[g] = -1;
    }
  }
  return best;
}

// Structured text dump mirroring the solution field names, for golden files.
inline std::string dump_solution(const RRMSolution& sol) {
  std::ostringstream out;
  out << "n_g " << sol.n_g << "\nn_u " << sol.n_u << "\nn_m " << sol.n_m
      << "\nobjective " << sol.objective_value << "\n";
  auto dump_vec = [&out](const char* name, const auto& vec) {
    out << name;
    for (auto v : vec) out << ' ' << static_cast<long long>(v);
    out << '\n';
  };
  dump_vec("lambda_gm", sol.lambda_gm);
  dump_vec("lambda_gu", sol.lambda_gu);
  dump_vec("lambda_um", sol.lambda_um);
  dump_vec("w_gm", sol.w_gm);
  dump_vec("w_gu", sol.w_gu);
  dump_vec("w_um", sol.w_um);
  dump_vec("e_j", sol.e_j);
  dump_vec("iota_mu", sol.iota_mu);
  dump_vec("iota_um", sol.iota_um);
  dump_vec("psi_g", sol.psi_g);
  dump_vec("psi_gm", sol.psi_gm);
  dump_vec("psi_gu", sol.psi_gu);
  return out.str();
}

}  // namespace uabsim
