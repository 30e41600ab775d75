#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "uabsim/learner.hpp"
#include "uabsim/rng.hpp"

namespace uabsim {

// Linear epsilon decay: 1 at episode 0 down to eps_min after
// eps_frac * total_episodes episodes.
struct EpsilonSchedule {
  double eps_min = 0.05;
  double eps_frac = 0.6;
  int total_episodes = 1000;

  void validate() const {
    if (eps_min <= 0.0 || eps_min >= 1.0) throw std::invalid_argument("eps_min in (0,1)");
    if (eps_frac <= 0.0 || eps_frac > 1.0) throw std::invalid_argument("eps_frac in (0,1]");
    if (total_episodes < 1) throw std::invalid_argument("total_episodes >= 1");
  }
};

inline double epsilon(const EpsilonSchedule& s, int episode) {
  if (episode < 0) throw std::invalid_argument("episode index must be >= 0");
  return std::max(s.eps_min, 1.0 - (1.0 - s.eps_min) * episode /
                                       (s.eps_frac * s.total_episodes));
}

// Agent observation concatenated with a one-hot service-area id.
struct AugmentedObservation {
  std::vector<double> values;

  static AugmentedObservation make(const std::vector<double>& base, int area_index,
                                   int n_areas) {
    if (area_index < 0 || area_index >= n_areas) {
      throw std::invalid_argument("area index out of range");
    }
    AugmentedObservation aug;
    aug.values = base;
    aug.values.resize(base.size() + n_areas, 0.0);
    aug.values[base.size() + area_index] = 1.0;
    return aug;
  }
};

enum class BehaviorMode { kRandom, kMeta, kExploit };

inline int advisor_action(const QFunction& advisor, const AugmentedObservation& aug) {
  return greedy_action(advisor, aug.values);
}

// Three-way behavior draw:
//   random  with prob eps_i * eps_mu
//   meta    with prob eps_i * (1 - eps_mu)
//   exploit with prob 1 - eps_i
inline BehaviorMode select_behavior(double eps_i, double eps_mu, Rng& rng) {
  if (eps_i < 0.0 || eps_i > 1.0 || eps_mu < 0.0 || eps_mu > 1.0) {
    throw std::invalid_argument("epsilons must lie in [0,1]");
  }
  const double draw = rng.uniform();
  if (draw < eps_i * eps_mu) return BehaviorMode::kRandom;
  if (draw < eps_i) return BehaviorMode::kMeta;
  return BehaviorMode::kExploit;
}

// Override condition: the task policy values the advisor's suggestion
// strictly below its mean Q over all actions.
inline bool check_override(const QFunction& task_net, const std::vector<double>& obs,
                           int advisor_suggestion) {
  const auto q = task_net.forward(obs);
  double mean = 0.0;
  for (double v : q) mean += v;
  mean /= static_cast<double>(q.size());
  return q[advisor_suggestion] < mean;
}

struct MamoDecision {
  int action = 0;
  BehaviorMode mode = BehaviorMode::kExploit;
  bool overridden = false;
};

// Full action selection: preliminary behavior draw, advisor override when
// enabled, then the mode-specific selector. A rejected advisor action stays
// reachable through the uniform random draw.
inline MamoDecision mamo_select(const QFunction& task_net, const QFunction* advisor,
                                const std::vector<double>& obs,
                                const AugmentedObservation& aug_obs, double eps_i,
                                double eps_mu, bool override_enabled, Rng& rng) {
  MamoDecision d;
  d.mode = select_behavior(eps_i, eps_mu, rng);
  if (d.mode == BehaviorMode::kMeta) {
    if (!advisor) throw std::invalid_argument("meta mode requires an advisor");
    const int suggestion = advisor_action(*advisor, aug_obs);
    if (override_enabled && check_override(task_net, obs, suggestion)) {
      d.mode = BehaviorMode::kRandom;
      d.overridden = true;
    } else {
      d.action = suggestion;
      return d;
    }
  }
  if (d.mode == BehaviorMode::kRandom) {
    d.action = static_cast<int>(rng.uniform_int(task_net.n_actions()));
  } else {
    d.action = greedy_action(task_net, obs);
  }
  return d;
}

}  // namespace uabsim
