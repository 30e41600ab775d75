#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uabsim/config.hpp"
#include "uabsim/env.hpp"
#include "uabsim/explore.hpp"
#include "uabsim/learner.hpp"
#include "uabsim/metrics.hpp"
#include "uabsim/plot.hpp"
#include "uabsim/rng.hpp"
#include "uabsim/scenario.hpp"

namespace uabsim {

struct RunOptions {
  std::string output_dir;  // empty: keep everything in memory
  bool write_metrics = true;
  bool write_checkpoints = true;
  bool write_episode_log = false;
  // ordered instrumentation trace ("eps_update:n", "buffer_task:i",
  // "buffer_advisor:i", "train_task:i", "train_advisor"); forces sequential
  // task execution when set
  std::vector<std::string>* event_log = nullptr;
};

struct RunResult {
  Strategy strategy;
  std::uint64_t seed = 0;
  std::vector<Task> tasks;
  std::vector<int> task_area_index;                // task -> index into cfg.areas
  std::vector<std::vector<RunRecord>> records;     // [task][episode]
  std::vector<QFunction> task_nets;                // one per slot (1 when shared)
  QFunction advisor;
  bool advisor_used = false;
  std::string metrics_path;

  const QFunction& net_for(size_t task_idx) const {
    return task_nets[task_nets.size() == 1 ? 0 : task_idx];
  }
};

namespace detail {

inline std::string run_tag(const Strategy& s, std::uint64_t seed) {
  return s.name() + "_s" + std::to_string(seed);
}

inline void count_packets(const RRMSolution& rrm, long long& mbs, long long& uabs) {
  for (int g = 0; g < rrm.n_g; ++g) {
    for (int m = 0; m < rrm.n_m; ++m) mbs += rrm.psi_gm[g * rrm.n_m + m] ? 1 : 0;
    for (int u = 0; u < rrm.n_u; ++u) uabs += rrm.psi_gu[g * rrm.n_u + u] ? 1 : 0;
  }
}

// served_history is [window][user]; the satisfaction metric wants [user][window]
inline std::vector<std::vector<int>> per_user_windows(
    const std::vector<std::vector<int>>& history) {
  std::vector<std::vector<int>> out;
  if (history.empty()) return out;
  out.resize(history[0].size());
  for (const auto& window : history) {
    for (size_t g = 0; g < window.size(); ++g) out[g].push_back(window[g]);
  }
  return out;
}

inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace detail

// Full training of one strategy from one master seed; deterministic in
// (cfg, strategy, master_seed).
inline RunResult run_training(const ExperimentConfig& cfg, const Strategy& strategy,
                              std::uint64_t master_seed, const RunOptions& opts = {}) {
  cfg.validate();
  if (cfg.fleet_size < 1) throw std::invalid_argument("training needs a fleet");

  const std::vector<ServiceArea> areas = cfg.build_areas();
  const std::vector<Task> tasks = enumerate_tasks(areas, cfg.takeoff_sets);
  const int n_tasks = static_cast<int>(tasks.size());
  const int n_areas = static_cast<int>(areas.size());
  const int t_steps = cfg.t_steps();

  // one mobility trace per area, reused by every task on that area
  std::vector<MobilityTrace> traces;
  for (const auto& area : areas) {
    traces.push_back(generate_trace(area,
                                    mix_seed(master_seed, 0x7ace00ull + area.id),
                                    t_steps + 1, cfg.v_gue, cfg.T_s));
  }
  std::vector<int> area_index(n_tasks, 0);
  std::vector<Environment> envs;
  envs.reserve(n_tasks);
  for (int i = 0; i < n_tasks; ++i) {
    int ai = 0;
    while (areas[ai].id != tasks[i].area_id) ++ai;
    area_index[i] = ai;
    envs.emplace_back(areas[ai], traces[ai], cfg.radio_config(), cfg.beam_geometry(),
                      cfg.env_config(areas[ai].gue_count));
  }

  const int obs_dim = 3 + 2 * cfg.fleet_size + cfg.n_beam;
  const bool shared_net = strategy.kind == Strategy::Kind::kGeneralized;
  const int n_slots = shared_net ? 1 : n_tasks;
  const std::vector<int> trunk{cfg.trunk_width, cfg.trunk_width};

  std::vector<QFunction> nets, targets;
  std::vector<OptimizerState> opt(n_slots);
  std::vector<ExperienceBuffer> buffers;
  std::vector<Rng> task_rng;
  std::vector<long long> train_iters(n_slots, 0);
  for (int s = 0; s < n_slots; ++s) {
    nets.emplace_back(obs_dim, kNumActions, trunk, cfg.head_width,
                      mix_seed(master_seed, 0x9e700000ull + s));
    targets.push_back(nets.back());
    opt[s].learning_rate = cfg.alpha;
    buffers.emplace_back(static_cast<size_t>(cfg.K_i));
    task_rng.emplace_back(mix_seed(master_seed, 0x7a510000ull + s));
  }

  const bool uses_advisor = strategy.uses_advisor();
  QFunction advisor, advisor_target;
  OptimizerState advisor_opt;
  ExperienceBuffer advisor_buffer(static_cast<size_t>(cfg.K_mu));
  Rng advisor_rng(mix_seed(master_seed, 0xad7150ull));
  long long advisor_iters = 0;
  if (uses_advisor) {
    advisor = QFunction(obs_dim + n_areas, kNumActions, trunk, cfg.head_width,
                        mix_seed(master_seed, 0xadf00dull));
    advisor_target = advisor;
    advisor_opt.learning_rate = cfg.alpha;
  }

  const double frac_i = (strategy.kind == Strategy::Kind::kEpsGreedy ||
                         strategy.kind == Strategy::Kind::kGeneralized)
                            ? strategy.eps_i_frac
                            : cfg.eps_i_frac;
  const EpsilonSchedule sched_i{cfg.eps_min, frac_i, cfg.N};
  const EpsilonSchedule sched_mu{cfg.eps_min, cfg.eps_mu_frac, cfg.N};

  RunResult result;
  result.strategy = strategy;
  result.seed = master_seed;
  result.tasks = tasks;
  result.task_area_index = area_index;
  result.records.assign(n_tasks, {});

  std::ofstream metrics, episode_log;
  if (!opts.output_dir.empty()) {
    std::filesystem::create_directories(opts.output_dir);
    const std::string tag = detail::run_tag(strategy, master_seed);
    if (opts.write_metrics) {
      result.metrics_path = opts.output_dir + "/metrics_" + tag + ".csv";
      metrics.open(result.metrics_path);
      if (!metrics) throw std::runtime_error("cannot write " + result.metrics_path);
      metrics << "strategy,task_id,seed,episode,return,aoc,mbs_packets,uabs_packets\n";
    }
    if (opts.write_episode_log) {
      episode_log.open(opts.output_dir + "/episodes_" + tag + ".csv");
      episode_log << "task_id,episode,t,u,x,y,action,reward\n";
    }
  }

  auto log_event = [&](const std::string& ev) {
    if (opts.event_log) opts.event_log->push_back(ev);
  };

  for (int n = 0; n < cfg.N; ++n) {
    const double eps_i = epsilon(sched_i, n);
    const double eps_mu = uses_advisor ? epsilon(sched_mu, n) : 1.0;
    log_event("eps_update:" + std::to_string(n));

    // advisor experiences staged per task and drained in task order at the
    // round barrier, so parallel and sequential runs append identically
    std::vector<std::vector<Experience>> advisor_staged(n_tasks);

    auto run_task = [&](int i) {
      const int slot = shared_net ? 0 : i;
      QFunction& net = nets[slot];
      Environment& env = envs[i];
      try {
        FleetState state =
            env.reset(tasks[i], mix_seed(master_seed,
                                         0xe9000000ull +
                                             static_cast<std::uint64_t>(n) * 64 + i));
        std::vector<Observation> obs = env.observe(state);
        std::vector<double> rewards;
        long long aoc = 0, mbs = 0, uabs = 0;
        for (int t = 0; t < t_steps; ++t) {
          std::vector<Action> actions(cfg.fleet_size);
          std::vector<int> raw(cfg.fleet_size);
          for (int u = 0; u < cfg.fleet_size; ++u) {
            const AugmentedObservation aug =
                AugmentedObservation::make(obs[u], area_index[i], n_areas);
            const MamoDecision d =
                mamo_select(net, uses_advisor ? &advisor : nullptr, obs[u], aug, eps_i,
                            eps_mu, strategy.override_enabled(), task_rng[slot]);
            if (d.overridden) ++aoc;
            raw[u] = d.action;
            actions[u] = static_cast<Action>(d.action);
          }
          const StepResult sr = env.step(state, actions);
          rewards.push_back(sr.reward);
          detail::count_packets(state.last_rrm, mbs, uabs);
          for (int u = 0; u < cfg.fleet_size; ++u) {
            Experience e{obs[u], raw[u], sr.reward, sr.observations[u], sr.done};
            if (uses_advisor) {
              Experience ae = e;
              ae.obs = AugmentedObservation::make(e.obs, area_index[i], n_areas).values;
              ae.next_obs =
                  AugmentedObservation::make(e.next_obs, area_index[i], n_areas).values;
              advisor_staged[i].push_back(std::move(ae));
            }
            buffers[slot].push(std::move(e));
          }
          log_event("buffer_task:" + std::to_string(i));
          if (uses_advisor) log_event("buffer_advisor:" + std::to_string(i));
          if (buffers[slot].size() >= static_cast<size_t>(cfg.k)) {
            train_step(net, targets[slot], buffers[slot], opt[slot],
                       static_cast<size_t>(cfg.k), cfg.gamma, task_rng[slot]);
            ++train_iters[slot];
            sync_target(net, targets[slot], train_iters[slot], cfg.Y);
            log_event("train_task:" + std::to_string(i));
          }
          if (episode_log.is_open()) {
            for (int u = 0; u < cfg.fleet_size; ++u) {
              episode_log << tasks[i].area_id << ',' << n << ',' << state.timestep
                          << ',' << u << ',' << detail::csv_double(state.positions[u].x)
                          << ',' << detail::csv_double(state.positions[u].y) << ','
                          << raw[u] << ',' << detail::csv_double(sr.reward) << '\n';
            }
          }
          obs = sr.observations;
        }
        RunRecord rec;
        rec.task_id = i;
        rec.episode = n;
        rec.episode_return = episode_return(rewards, cfg.fleet_size);
        rec.aoc = aoc;
        rec.mbs_packets = mbs;
        rec.uabs_packets = uabs;
        rec.window_served = detail::per_user_windows(state.served_history);
        result.records[i].push_back(std::move(rec));
      } catch (const std::exception& ex) {
        throw std::runtime_error("task " + std::to_string(i) + " episode " +
                                 std::to_string(n) + ": " + ex.what());
      }
    };

    const bool parallel_tasks =
        cfg.parallel && !opts.event_log && !opts.write_episode_log && !shared_net &&
        n_tasks > 1;
    if (parallel_tasks) {
      std::vector<std::future<void>> futs;
      for (int i = 0; i < n_tasks; ++i) {
        futs.push_back(std::async(std::launch::async, run_task, i));
      }
      for (auto& f : futs) f.get();
    } else {
      for (int i = 0; i < n_tasks; ++i) run_task(i);
    }

    if (uses_advisor) {
      for (int i = 0; i < n_tasks; ++i) {
        for (auto& e : advisor_staged[i]) advisor_buffer.push(std::move(e));
      }
      if (advisor_buffer.size() >= static_cast<size_t>(cfg.k)) {
        for (int j = 0; j < cfg.J; ++j) {
          train_step(advisor, advisor_target, advisor_buffer, advisor_opt,
                     static_cast<size_t>(cfg.k), cfg.gamma, advisor_rng);
          ++advisor_iters;
          sync_target(advisor, advisor_target, advisor_iters, cfg.Y);
          log_event("train_advisor");
        }
      }
    }

    if (metrics.is_open()) {
      for (int i = 0; i < n_tasks; ++i) {
        const RunRecord& r = result.records[i].back();
        metrics << strategy.name() << ',' << i << ',' << master_seed << ',' << n << ','
                << detail::csv_double(r.episode_return) << ',' << r.aoc << ','
                << r.mbs_packets << ',' << r.uabs_packets << '\n';
      }
      metrics.flush();
    }

    const bool at_checkpoint =
        (n + 1) % std::max(cfg.checkpoint_interval, 1) == 0 || n + 1 == cfg.N;
    if (at_checkpoint && opts.write_checkpoints && !opts.output_dir.empty()) {
      const std::string tag = detail::run_tag(strategy, master_seed);
      for (int s = 0; s < n_slots; ++s) {
        save_checkpoint(nets[s], opt[s],
                        opts.output_dir + "/ckpt_" + tag + "_net" + std::to_string(s) +
                            ".qnt");
      }
      if (uses_advisor) {
        save_checkpoint(advisor, advisor_opt,
                        opts.output_dir + "/ckpt_" + tag + "_advisor.qnt");
      }
    }
  }

  result.task_nets = std::move(nets);
  result.advisor = std::move(advisor);
  result.advisor_used = uses_advisor;
  return result;
}

// --- greedy evaluation -------------------------------------------------

struct EvalResult {
  double episode_return = 0.0;
  long long mbs_packets = 0;
  long long uabs_packets = 0;
  std::vector<std::vector<int>> window_served;
};

// Rolls one episode with the greedy policy (or with an empty fleet when
// `net` is null) and tallies delivered packets.
inline EvalResult evaluate_policy(const ExperimentConfig& cfg, const ServiceArea& area,
                                  const Task& task, const QFunction* net,
                                  std::uint64_t seed) {
  const int t_steps = cfg.t_steps();
  const MobilityTrace trace = generate_trace(
      area, mix_seed(seed, 0x7ace00ull + area.id), t_steps + 1, cfg.v_gue, cfg.T_s);
  Environment env(area, trace, cfg.radio_config(), cfg.beam_geometry(),
                  cfg.env_config(area.gue_count));
  Task eval_task = task;
  if (!net) eval_task.takeoff.clear();
  FleetState state = env.reset(eval_task, mix_seed(seed, 0xe9a1ull));
  std::vector<Observation> obs = env.observe(state);
  EvalResult out;
  double total_reward = 0.0;
  const int fleet = static_cast<int>(eval_task.takeoff.size());
  for (int t = 0; t < t_steps; ++t) {
    std::vector<Action> actions(fleet);
    if (net) {
      for (int u = 0; u < fleet; ++u) {
        actions[u] = static_cast<Action>(greedy_action(*net, obs[u]));
      }
    }
    const StepResult sr = env.step(state, actions);
    total_reward += sr.reward;
    detail::count_packets(state.last_rrm, out.mbs_packets, out.uabs_packets);
    obs = sr.observations;
  }
  out.episode_return = std::max(fleet, 1) * total_reward;
  out.window_served = detail::per_user_windows(state.served_history);
  return out;
}

// --- strategy matrix ----------------------------------------------------

struct MatrixResult {
  std::vector<RunResult> runs;
  std::vector<std::string> failures;  // "strategy seed: message"
  std::string summary_path;
};

namespace detail {

inline std::vector<double> mean_return_series(const RunResult& run) {
  std::vector<std::vector<double>> per_task;
  for (const auto& recs : run.records) {
    std::vector<double> series;
    for (const auto& r : recs) series.push_back(r.episode_return);
    per_task.push_back(std::move(series));
  }
  const size_t n = per_task.empty() ? 0 : per_task[0].size();
  std::vector<double> mean(n, 0.0);
  for (const auto& s : per_task) {
    for (size_t i = 0; i < n; ++i) mean[i] += s[i] / per_task.size();
  }
  return mean;
}

inline std::vector<double> mean_aoc_series(const RunResult& run) {
  const size_t n = run.records.empty() ? 0 : run.records[0].size();
  std::vector<double> mean(n, 0.0);
  for (const auto& recs : run.records) {
    for (size_t i = 0; i < n; ++i) {
      mean[i] += static_cast<double>(recs[i].aoc) / run.records.size();
    }
  }
  return mean;
}

}  // namespace detail

// Renders the comparison figures for a completed matrix.
inline void emit_plots(const MatrixResult& matrix, const ExperimentConfig& cfg,
                       const std::string& output_dir) {
  if (matrix.runs.empty()) throw std::invalid_argument("no records to plot");
  std::filesystem::create_directories(output_dir);

  // smoothed return curves, averaged over seeds per strategy
  std::vector<PlotSeries> ret_series, aoc_series;
  std::vector<std::string> names;
  for (const auto& run : matrix.runs) {
    const std::string name = run.strategy.name();
    if (std::find(names.begin(), names.end(), name) != names.end()) continue;
    names.push_back(name);
    std::vector<double> mean;
    std::vector<double> aoc;
    int count = 0;
    for (const auto& r : matrix.runs) {
      if (r.strategy.name() != name) continue;
      const auto s = detail::mean_return_series(r);
      const auto a = detail::mean_aoc_series(r);
      if (mean.empty()) {
        mean.assign(s.size(), 0.0);
        aoc.assign(a.size(), 0.0);
      }
      for (size_t i = 0; i < s.size(); ++i) mean[i] += s[i];
      for (size_t i = 0; i < a.size(); ++i) aoc[i] += a[i];
      ++count;
    }
    for (double& v : mean) v /= count;
    for (double& v : aoc) v /= count;
    ret_series.push_back({name, moving_average(mean, 50), {}, {}});
    aoc_series.push_back({name, moving_average(aoc, 50), {}, {}});
  }
  write_svg_plot(output_dir + "/returns.svg", "Smoothed mean return per strategy",
                 "episode", "return", ret_series);
  write_svg_plot(output_dir + "/aoc.svg", "Advisor override count per episode",
                 "episode", "overrides", aoc_series);

  // FSE vs threshold percentage
  double max_ret = 0.0;
  for (const auto& run : matrix.runs) {
    for (double v : moving_average(detail::mean_return_series(run), 50)) {
      max_ret = std::max(max_ret, v);
    }
  }
  std::vector<PlotSeries> fse_series;
  for (const auto& name : names) {
    PlotSeries s{name, {}, {}, {}};
    for (int pct = 10; pct <= 90; pct += 10) {
      double total = 0.0;
      int count = 0;
      for (const auto& run : matrix.runs) {
        if (run.strategy.name() != name) continue;
        const auto smooth = moving_average(detail::mean_return_series(run), 50);
        const auto fse = first_successful_episode(smooth, max_ret * pct / 100.0);
        total += fse ? *fse : static_cast<int>(smooth.size());
        ++count;
      }
      s.values.push_back(count ? total / count : 0.0);
    }
    fse_series.push_back(std::move(s));
  }
  write_svg_plot(output_dir + "/fse.svg",
                 "First successful episode vs threshold (10%..90% of max)",
                 "threshold decile", "episode", fse_series);

  // satisfied-user percentage band over the final-episode windows
  PlotSeries pg{"P_g", {}, {}, {}};
  for (int ns = 1; ns <= cfg.N_w; ++ns) {
    double mean = 0.0, lo = 1e300, hi = -1e300;
    int count = 0;
    for (const auto& run : matrix.runs) {
      for (const auto& recs : run.records) {
        if (recs.empty() || recs.back().window_served.empty()) continue;
        const auto sat = satisfied_percentage(recs.back().window_served, ns);
        mean += sat.p_g;
        lo = std::min(lo, sat.p_g);
        hi = std::max(hi, sat.p_g);
        ++count;
      }
    }
    if (count == 0) {
      mean = lo = hi = 0.0;
      count = 1;
    }
    pg.values.push_back(mean / count);
    pg.band_lo.push_back(lo);
    pg.band_hi.push_back(hi);
  }
  write_svg_plot(output_dir + "/pg.svg", "Satisfied users vs required services",
                 "required services per window", "satisfied %", {pg});
}

// Runs the full strategy x seed comparison and writes every artifact.
inline MatrixResult run_matrix(const ExperimentConfig& cfg,
                               const std::string& output_dir) {
  cfg.validate();
  const std::vector<Strategy> strategies = cfg.parsed_strategies();
  if (strategies.empty()) throw std::invalid_argument("no strategies");
  std::filesystem::create_directories(output_dir);

  struct Job {
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : strategies) {
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({s, seed});
  }

  MatrixResult out;
  auto run_one = [&](const Job& job)
      -> std::pair<std::optional<RunResult>, std::string> {
    try {
      RunOptions opts;
      opts.output_dir = output_dir;
      ExperimentConfig run_cfg = cfg;
      run_cfg.parallel = false;  // parallelism lives at the run level here
      return {run_training(run_cfg, job.strategy, job.seed, opts), ""};
    } catch (const std::exception& ex) {
      return {std::nullopt,
              job.strategy.name() + " seed " + std::to_string(job.seed) + ": " +
                  ex.what()};
    }
  };

  if (cfg.parallel && jobs.size() > 1) {
    std::vector<std::future<std::pair<std::optional<RunResult>, std::string>>> futs;
    for (const auto& job : jobs) {
      futs.push_back(std::async(std::launch::async, run_one, job));
    }
    for (auto& f : futs) {
      auto [res, err] = f.get();
      if (res) out.runs.push_back(std::move(*res));
      else out.failures.push_back(err);
    }
  } else {
    for (const auto& job : jobs) {
      auto [res, err] = run_one(job);
      if (res) out.runs.push_back(std::move(*res));
      else out.failures.push_back(err);
    }
  }
  if (out.runs.empty()) {
    out.summary_path = output_dir + "/summary.md";
    std::ofstream summary(out.summary_path);
    summary << "# Comparison summary\n\nAll runs failed.\n";
    for (const auto& f : out.failures) summary << "- " << f << "\n";
    return out;
  }

  // reference strategy for win ratios: mamo when present, else the first
  std::string ref = strategies[0].name();
  for (const auto& s : strategies) {
    if (s.kind == Strategy::Kind::kMamo) ref = s.name();
  }

  auto runs_of = [&](const std::string& name) {
    std::vector<const RunResult*> rs;
    for (const auto& r : out.runs) {
      if (r.strategy.name() == name) rs.push_back(&r);
    }
    return rs;
  };

  // win-ratio table: share of episodes where the reference beats each rival,
  // averaged over seeds, one row per strategy, one column per task
  const int n_tasks = static_cast<int>(out.runs[0].records.size());
  {
    std::ofstream f(output_dir + "/win_ratio.csv");
    f << "strategy";
    for (int i = 0; i < n_tasks; ++i) f << ",task_" << i;
    f << "\n";
    const auto ref_runs = runs_of(ref);
    for (const auto& s : strategies) {
      if (s.name() == ref) continue;
      f << s.name();
      const auto rival_runs = runs_of(s.name());
      for (int i = 0; i < n_tasks; ++i) {
        double total = 0.0;
        int count = 0;
        for (const auto* a : ref_runs) {
          for (const auto* b : rival_runs) {
            if (a->seed != b->seed) continue;
            std::vector<double> ra, rb;
            for (const auto& r : a->records[i]) ra.push_back(r.episode_return);
            for (const auto& r : b->records[i]) rb.push_back(r.episode_return);
            total += win_ratio(ra, rb);
            ++count;
          }
        }
        f << ',' << detail::csv_double(count ? total / count : 0.0);
      }
      f << "\n";
    }
  }

  // per-strategy FSE table at deciles of the global max smoothed return
  double max_ret = 0.0;
  for (const auto& run : out.runs) {
    for (double v : moving_average(detail::mean_return_series(run), 50)) {
      max_ret = std::max(max_ret, v);
    }
  }
  {
    std::ofstream f(output_dir + "/fse.csv");
    f << "strategy";
    for (int pct = 10; pct <= 90; pct += 10) f << ",fse_" << pct;
    f << "\n";
    for (const auto& s : strategies) {
      f << s.name();
      for (int pct = 10; pct <= 90; pct += 10) {
        double total = 0.0;
        int count = 0;
        for (const auto* run : runs_of(s.name())) {
          const auto smooth = moving_average(detail::mean_return_series(*run), 50);
          const auto fse = first_successful_episode(smooth, max_ret * pct / 100.0);
          total += fse ? *fse : static_cast<int>(smooth.size());
          ++count;
        }
        f << ',' << detail::csv_double(count ? total / count : 0.0);
      }
      f << "\n";
    }
  }

  // load distribution: greedy episode per task with the trained reference
  // policy, plus the empty-fleet baseline
  {
    std::ofstream f(output_dir + "/load.csv");
    f << "policy,task,mbs_packets,uabs_packets,mbs_share,uabs_share\n";
    const auto ref_runs = runs_of(ref);
    const auto areas = cfg.build_areas();
    if (!ref_runs.empty()) {
      const RunResult& run = *ref_runs.front();
      for (size_t i = 0; i < run.tasks.size(); ++i) {
        const ServiceArea& area = areas[run.task_area_index[i]];
        const EvalResult fleet =
            evaluate_policy(cfg, area, run.tasks[i], &run.net_for(i), run.seed);
        const EvalResult none =
            evaluate_policy(cfg, area, run.tasks[i], nullptr, run.seed);
        const LoadDistribution ld =
            load_distribution(fleet.mbs_packets, fleet.uabs_packets);
        const LoadDistribution ln =
            load_distribution(none.mbs_packets, none.uabs_packets);
        f << ref << ',' << i << ',' << fleet.mbs_packets << ',' << fleet.uabs_packets
          << ',' << detail::csv_double(ld.mbs_share) << ','
          << detail::csv_double(ld.uabs_share) << "\n";
        f << "no_uabs," << i << ',' << none.mbs_packets << ',' << none.uabs_packets
          << ',' << detail::csv_double(ln.mbs_share) << ','
          << detail::csv_double(ln.uabs_share) << "\n";
      }
    }
  }

  emit_plots(out, cfg, output_dir);

  out.summary_path = output_dir + "/summary.md";
  {
    std::ofstream summary(out.summary_path);
    summary << "# Comparison summary\n\n";
    summary << "Strategies: ";
    for (size_t i = 0; i < strategies.size(); ++i) {
      summary << (i ? ", " : "") << strategies[i].name();
    }
    summary << " (reference: " << ref << ")\n\n";
    summary << "Seeds: " << cfg.seeds.size() << ", episodes: " << cfg.N
            << ", tasks: " << n_tasks << "\n\n";
    summary << "Artifacts: metrics_*.csv, win_ratio.csv, fse.csv, load.csv, "
               "returns.svg, aoc.svg, fse.svg, pg.svg\n\n";
    if (!out.failures.empty()) {
      summary << "## Failed runs\n\n";
      for (const auto& fmsg : out.failures) summary << "- " << fmsg << "\n";
    }
    summary << "## Final smoothed return (mean over last 50 episodes)\n\n";
    summary << "| strategy | mean return |\n|---|---|\n";
    for (const auto& s : strategies) {
      double total = 0.0;
      int count = 0;
      for (const auto* run : runs_of(s.name())) {
        const auto series = detail::mean_return_series(*run);
        const size_t start = series.size() > 50 ? series.size() - 50 : 0;
        double m = 0.0;
        for (size_t i = start; i < series.size(); ++i) m += series[i];
        total += m / std::max<size_t>(series.size() - start, 1);
        ++count;
      }
      summary << "| " << s.name() << " | "
              << detail::csv_double(count ? total / count : 0.0) << " |\n";
    }
  }
  return out;
}

}  // namespace uabsim
