#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uabsim {

// Everything recorded about one (task, episode) pair.
struct RunRecord {
  int task_id = 0;
  int episode = 0;
  double episode_return = 0.0;
  long long aoc = 0;  // advisor override count
  long long mbs_packets = 0;
  long long uabs_packets = 0;
  // served counts per user per closed service window (N_s samples)
  std::vector<std::vector<int>> window_served;
};

// R = |U| * sum_t r_t (the shared per-step reward summed over agents).
inline double episode_return(const std::vector<double>& step_rewards, int fleet_size) {
  double total = 0.0;
  for (double r : step_rewards) total += r;
  return fleet_size * total;
}

// Mean across tasks at a fixed episode index.
inline double average_return(const std::vector<std::vector<double>>& per_task_returns,
                             int episode) {
  if (per_task_returns.empty()) throw std::invalid_argument("no tasks");
  double total = 0.0;
  for (const auto& series : per_task_returns) {
    if (episode < 0 || episode >= static_cast<int>(series.size())) {
      throw std::invalid_argument("task missing episode " + std::to_string(episode));
    }
    total += series[episode];
  }
  return total / static_cast<double>(per_task_returns.size());
}

// Trailing moving average, window 50 by default for reporting.
inline std::vector<double> moving_average(const std::vector<double>& series,
                                          int window = 50) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<size_t>(window)) acc -= series[i - window];
    out[i] = acc / std::min<double>(static_cast<double>(i + 1), window);
  }
  return out;
}

// First episode whose return reaches the threshold.
inline std::optional<int> first_successful_episode(const std::vector<double>& returns,
                                                   double r_th) {
  for (size_t n = 0; n < returns.size(); ++n) {
    if (returns[n] >= r_th) return static_cast<int>(n);
  }
  return std::nullopt;
}

// P_g: mean over users of the fraction of that user's windows satisfying
// N_s >= n_hat_s. Users with no windows are excluded and reported.
struct SatisfactionResult {
  double p_g = 0.0;
  std::vector<int> excluded_users;
};

inline SatisfactionResult satisfied_percentage(
    const std::vector<std::vector<int>>& per_user_window_served, int n_hat_s) {
  if (n_hat_s < 1) throw std::invalid_argument("n_hat_s must be >= 1");
  SatisfactionResult res;
  double total = 0.0;
  int counted = 0;
  for (size_t g = 0; g < per_user_window_served.size(); ++g) {
    const auto& windows = per_user_window_served[g];
    if (windows.empty()) {
      res.excluded_users.push_back(static_cast<int>(g));
      continue;
    }
    int sat = 0;
    for (int n_s : windows) {
      if (n_s >= n_hat_s) ++sat;
    }
    total += static_cast<double>(sat) / static_cast<double>(windows.size());
    ++counted;
  }
  res.p_g = counted > 0 ? total / counted : 0.0;
  return res;
}

// Fraction of episodes where a strictly beats b.
inline double win_ratio(const std::vector<double>& returns_a,
                        const std::vector<double>& returns_b) {
  if (returns_a.size() != returns_b.size()) {
    throw std::invalid_argument("win_ratio requires equal-length series");
  }
  if (returns_a.empty()) return 0.0;
  int wins = 0;
  for (size_t i = 0; i < returns_a.size(); ++i) {
    if (returns_a[i] > returns_b[i]) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(returns_a.size());
}

// Served-packet counts per BS and their shares of the total.
struct LoadDistribution {
  long long mbs_packets = 0;
  long long uabs_packets = 0;
  double mbs_share = 0.0;
  double uabs_share = 0.0;
  bool defined = false;  // false when nothing was served
};

inline LoadDistribution load_distribution(long long mbs_packets, long long uabs_packets) {
  LoadDistribution d;
  d.mbs_packets = mbs_packets;
  d.uabs_packets = uabs_packets;
  const long long total = mbs_packets + uabs_packets;
  if (total > 0) {
    d.defined = true;
    d.mbs_share = static_cast<double>(mbs_packets) / total;
    d.uabs_share = static_cast<double>(uabs_packets) / total;
  }
  return d;
}

}  // namespace uabsim
