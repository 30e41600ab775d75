#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uabsim/radio.hpp"
#include "uabsim/rrm.hpp"
#include "uabsim/scenario.hpp"

namespace uabsim {

// Nine discrete moves: eight compass directions plus hover.
inline constexpr int kNumActions = 9;

enum class Action : int {
  kLeft = 0,
  kUp = 1,
  kRight = 2,
  kDown = 3,
  kUpLeft = 4,
  kUpRight = 5,
  kDownRight = 6,
  kDownLeft = 7,
  kHover = 8,
};

// Unit displacement per action; diagonals are normalized so the total
// step length equals v * delta_t.
inline Point action_direction(Action a) {
  constexpr double kDiag = 0.70710678118654752440;
  switch (a) {
    case Action::kLeft: return {-1.0, 0.0};
    case Action::kUp: return {0.0, 1.0};
    case Action::kRight: return {1.0, 0.0};
    case Action::kDown: return {0.0, -1.0};
    case Action::kUpLeft: return {-kDiag, kDiag};
    case Action::kUpRight: return {kDiag, kDiag};
    case Action::kDownRight: return {kDiag, -kDiag};
    case Action::kDownLeft: return {-kDiag, -kDiag};
    case Action::kHover: return {0.0, 0.0};
  }
  throw std::invalid_argument("invalid action");
}

struct EnvConfig {
  double uabs_speed = 20.0;  // m/s
  double delta_t = 10.0;     // s
  int t_steps = 27;          // episode length T / delta_t
  int n_w = 9;               // service window length, steps
  int ru_budget = 50;
  double demand_bits = 4000.0;
  double per_beam_scale = 0.0;  // 0: derived as gue_count * n_w
};

struct FleetState {
  std::vector<Point> positions;
  int timestep = 0;
  std::vector<int> priorities;       // p_g
  int window_clock = 0;              // 1-based position within the window
  std::vector<int> window_served;    // N_s accumulated in the current window
  std::vector<std::vector<int>> served_history;  // per user, per closed window
  RRMSolution last_rrm;
};

// Local observation: own position, normalized timestep, fleet positions,
// per-beam served-priority sums. Length 3 + 2|U| + N_beam.
using Observation = std::vector<double>;

inline std::vector<Point> apply_actions(const std::vector<Point>& positions,
                                        const std::vector<Action>& actions,
                                        double v, double delta_t,
                                        const ServiceArea& area) {
  if (actions.size() != positions.size()) {
    throw std::invalid_argument("one action per agent required");
  }
  std::vector<Point> next(positions.size());
  for (size_t u = 0; u < positions.size(); ++u) {
    const Point dir = action_direction(actions[u]);
    next[u].x = std::clamp(positions[u].x + dir.x * v * delta_t, 0.0, area.length);
    next[u].y = std::clamp(positions[u].y + dir.y * v * delta_t, 0.0, area.width);
  }
  return next;
}

// Priority bookkeeping over service windows: reset to 1 at window
// start, increment when served.
inline void update_priorities(FleetState& state, const RRMSolution& rrm) {
  const int n_g = static_cast<int>(state.priorities.size());
  for (int g = 0; g < n_g; ++g) {
    if (state.window_clock == 1) {
      state.priorities[g] = 1;
    } else if (rrm.psi_g[g]) {
      state.priorities[g] += 1;
    }
    if (rrm.psi_g[g]) state.window_served[g] += 1;
  }
}

// Shared reward: fleet-served priority mass averaged over the fleet.
// MBS-served users do not contribute.
inline double compute_reward(const RRMSolution& rrm, const std::vector<int>& priorities,
                             int fleet_size) {
  if (fleet_size < 1) throw std::invalid_argument("fleet_size must be >= 1");
  double total = 0.0;
  for (int g = 0; g < rrm.n_g; ++g) {
    for (int u = 0; u < rrm.n_u; ++u) {
      if (rrm.psi_gu[g * rrm.n_u + u]) total += priorities[g];
    }
  }
  return total / fleet_size;
}

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;
  bool done = false;
};

// One task environment: owns the area, trace, and radio configuration, and
// threads the RRM through every transition.
class Environment {
 public:
  Environment(ServiceArea area, MobilityTrace trace, LinkBudgetConfig radio,
              BeamGeometry geom, EnvConfig cfg)
      : area_(std::move(area)),
        trace_(std::move(trace)),
        radio_(radio),
        geom_(geom),
        cfg_(cfg) {
    if (trace_.horizon < cfg_.t_steps) {
      throw std::invalid_argument("trace shorter than the episode horizon");
    }
    radio_.delta_t_s = cfg_.delta_t;
    per_beam_scale_ = cfg_.per_beam_scale > 0.0
                          ? cfg_.per_beam_scale
                          : static_cast<double>(std::max(area_.gue_count, 1)) * cfg_.n_w;
  }

  const ServiceArea& area() const { return area_; }
  const EnvConfig& config() const { return cfg_; }
  int n_users() const { return area_.gue_count; }

  int observation_dim(int fleet_size) const {
    return 3 + 2 * fleet_size + geom_.n_beam;
  }

  FleetState reset(const Task& task, std::uint64_t episode_seed) {
    for (const auto& p : task.takeoff) {
      if (!area_.contains(p)) throw std::invalid_argument("takeoff out of bounds");
    }
    episode_seed_ = episode_seed;
    FleetState state;
    state.positions = task.takeoff;
    state.timestep = 0;
    state.priorities.assign(area_.gue_count, 1);
    state.window_clock = 0;  // advances to 1 on the first served step
    state.window_served.assign(area_.gue_count, 0);
    state.last_rrm.resize(area_.gue_count, static_cast<int>(task.takeoff.size()), 1,
                          geom_.n_beam);
    last_beam_of_.clear();
    last_priorities_.clear();
    return state;
  }

  std::vector<Observation> observe(const FleetState& state) const {
    const int n_u = static_cast<int>(state.positions.size());
    std::vector<Observation> obs(n_u);
    for (int u = 0; u < n_u; ++u) {
      Observation& o = obs[u];
      o.reserve(observation_dim(n_u));
      o.push_back(state.positions[u].x / area_.length);
      o.push_back(state.positions[u].y / area_.width);
      o.push_back(static_cast<double>(state.timestep) / cfg_.t_steps);
      for (int v = 0; v < n_u; ++v) {
        o.push_back(state.positions[v].x / area_.length);
        o.push_back(state.positions[v].y / area_.width);
      }
      // per-beam served-priority sums from the transition into this state
      std::vector<double> beams(geom_.n_beam, 0.0);
      const RRMSolution& rrm = state.last_rrm;
      if (!last_beam_of_.empty() && rrm.n_g == area_.gue_count && u < rrm.n_u) {
        for (int g = 0; g < rrm.n_g; ++g) {
          if (!rrm.psi_gu[g * rrm.n_u + u]) continue;
          const int j = last_beam_of_[g * rrm.n_u + u];
          if (j >= 0) beams[j] += last_priorities_.empty() ? 1.0 : last_priorities_[g];
        }
      }
      for (double b : beams) o.push_back(std::min(b / per_beam_scale_, 1.0));
    }
    return obs;
  }

  // Applies the joint action, advances users along the trace, solves the
  // RRM, updates priorities, and returns the shared reward.
  StepResult step(FleetState& state, const std::vector<Action>& actions) {
    if (state.timestep >= cfg_.t_steps) throw std::runtime_error("episode is over");

    state.positions =
        apply_actions(state.positions, actions, cfg_.uabs_speed, cfg_.delta_t, area_);
    const int t_next = state.timestep + 1;

    // window bookkeeping for the incoming step
    state.window_clock += 1;
    if (state.window_clock > cfg_.n_w) {
      state.served_history.push_back(state.window_served);
      state.window_served.assign(area_.gue_count, 0);
      state.window_clock = 1;
    }

    std::vector<Point> users(area_.gue_count);
    const int trace_t = std::min(t_next, trace_.horizon - 1);
    for (int g = 0; g < area_.gue_count; ++g) users[g] = trace_.at(trace_t, g);

    const CoverageMatrix cov =
        compute_coverage(state.positions, users, area_, radio_, geom_,
                         mix_seed(episode_seed_, 0xc0u + static_cast<std::uint64_t>(t_next)));

    // priorities reset at window start before the RRM sees them
    if (state.window_clock == 1) {
      std::fill(state.priorities.begin(), state.priorities.end(), 1);
    }

    RRMSolution rrm;
    if (area_.gue_count > 0) {
      const RRMInstance inst = build_instance(
          cov, state.priorities,
          std::vector<double>(area_.gue_count, cfg_.demand_bits), cfg_.ru_budget,
          cfg_.delta_t);
      rrm = solve_greedy(inst);
      const FeasibilityReport rep = verify_feasibility(inst, rrm);
      if (!rep.feasible) {
        throw std::runtime_error("RRM produced an infeasible solution at " +
                                 rep.first_violation);
      }
    } else {
      rrm.resize(0, static_cast<int>(state.positions.size()), 1, geom_.n_beam);
    }

    StepResult result;
    result.reward = state.positions.empty()
                        ? 0.0  // no-fleet baseline
                        : compute_reward(rrm, state.priorities,
                                         static_cast<int>(state.positions.size()));
    last_priorities_ = state.priorities;

    // priority update consumes the pre-update values used by the RRM
    update_priorities(state, rrm);

    last_beam_of_.assign(static_cast<size_t>(cov.n_g) * cov.n_u, -1);
    for (int g = 0; g < cov.n_g; ++g) {
      for (int u = 0; u < cov.n_u; ++u) {
        last_beam_of_[g * cov.n_u + u] = cov.beam_of(g, u);
      }
    }
    state.last_rrm = std::move(rrm);
    state.timestep = t_next;
    result.done = t_next >= cfg_.t_steps;
    if (result.done && state.window_clock > 0) {
      state.served_history.push_back(state.window_served);
    }
    result.observations = observe(state);
    return result;
  }

 private:
  ServiceArea area_;
  MobilityTrace trace_;
  LinkBudgetConfig radio_;
  BeamGeometry geom_;
  EnvConfig cfg_;
  double per_beam_scale_ = 1.0;
  std::uint64_t episode_seed_ = 0;
  std::vector<int> last_priorities_;
  std::vector<int> last_beam_of_;
};

}  // namespace uabsim
