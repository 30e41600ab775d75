// Command-line front end: train one strategy, run the full comparison
// matrix, replay a trajectory log, or validate a config file.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uabsim/config.hpp"
#include "uabsim/harness.hpp"

namespace {

uabsim::ExperimentConfig resolve_config(const std::string& config_path,
                                        const std::string& profile) {
  if (!config_path.empty()) return uabsim::load_config(config_path);
  if (profile == "full") return uabsim::full_profile();
  return uabsim::desk_profile();
}

// Renders an episode log (task_id,episode,t,u,x,y,action,reward) as a
// per-agent trajectory listing plus an SVG per (task, episode).
int replay(const std::string& log_path, const std::string& output_dir) {
  std::ifstream in(log_path);
  if (!in) {
    std::cerr << "cannot open log: " << log_path << "\n";
    return 1;
  }
  struct Row {
    int task, episode, t, u, action;
    double x, y, reward;
  };
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("task_id", 0) == 0) continue;
    Row r{};
    char c;
    std::istringstream ss(line);
    if (!(ss >> r.task >> c >> r.episode >> c >> r.t >> c >> r.u >> c >> r.x >> c >>
          r.y >> c >> r.action >> c >> r.reward)) {
      std::cerr << "malformed log row at line " << line_no << "\n";
      return 1;
    }
    rows.push_back(r);
  }
  if (rows.empty()) {
    std::cerr << "log is empty\n";
    return 1;
  }
  std::filesystem::create_directories(output_dir);
  std::map<std::pair<int, int>, std::map<int, std::vector<uabsim::Point>>> paths;
  std::map<std::pair<int, int>, double> returns;
  for (const Row& r : rows) {
    paths[{r.task, r.episode}][r.u].push_back({r.x, r.y});
    returns[{r.task, r.episode}] += r.reward;
  }
  for (const auto& [key, agents] : paths) {
    std::vector<uabsim::PlotSeries> series;
    for (const auto& [u, pts] : agents) {
      uabsim::PlotSeries sx{"u" + std::to_string(u) + " x", {}, {}, {}};
      uabsim::PlotSeries sy{"u" + std::to_string(u) + " y", {}, {}, {}};
      for (const auto& p : pts) {
        sx.values.push_back(p.x);
        sy.values.push_back(p.y);
      }
      series.push_back(std::move(sx));
      series.push_back(std::move(sy));
    }
    const std::string name = output_dir + "/replay_task" + std::to_string(key.first) +
                             "_ep" + std::to_string(key.second) + ".svg";
    uabsim::write_svg_plot(name, "Fleet trajectory coordinates", "step", "meters",
                           series);
    std::cout << "task " << key.first << " episode " << key.second << ": "
              << agents.size() << " agents, " << agents.begin()->second.size()
              << " steps, summed step reward " << returns[key] << " -> " << name
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UABS fleet trajectory-learning simulator"};
  app.require_subcommand(1);

  std::string config_path, profile = "desk", output_dir = "out", log_path;
  std::string strategy_text = "mamo";
  std::uint64_t seed = 1;
  bool episode_log = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (JSON)");
    sub->add_option("--profile", profile, "desk or full (ignored with --config)")
        ->check(CLI::IsMember({"desk", "full"}));
    sub->add_option("--out", output_dir, "output directory");
  };

  CLI::App* train = app.add_subcommand("train", "train one strategy");
  add_common(train);
  train->add_option("--strategy", strategy_text,
                    "mamo | mama | generalized | eps_greedy[:frac]");
  train->add_option("--seed", seed, "master seed");
  train->add_flag("--episode-log", episode_log, "write per-step trajectory log");

  CLI::App* matrix = app.add_subcommand("matrix", "full strategy comparison");
  add_common(matrix);

  CLI::App* rep = app.add_subcommand("replay", "render a trajectory log");
  rep->add_option("--log", log_path, "episode log file")->required();
  rep->add_option("--out", output_dir, "output directory");

  CLI::App* val = app.add_subcommand("validate-config", "check a config file");
  val->add_option("--config", config_path, "config file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const uabsim::ExperimentConfig cfg = resolve_config(config_path, profile);
      const uabsim::Strategy strategy =
          uabsim::Strategy::parse(strategy_text, cfg.eps_i_frac);
      uabsim::RunOptions opts;
      opts.output_dir = output_dir;
      opts.write_episode_log = episode_log;
      const uabsim::RunResult result =
          uabsim::run_training(cfg, strategy, seed, opts);
      double final_mean = 0.0;
      int count = 0;
      for (const auto& recs : result.records) {
        for (size_t i = recs.size() > 50 ? recs.size() - 50 : 0; i < recs.size();
             ++i) {
          final_mean += recs[i].episode_return;
          ++count;
        }
      }
      std::cout << "trained " << strategy.name() << " seed " << seed << ": "
                << result.records.size() << " tasks, " << cfg.N
                << " episodes, final-50 mean return "
                << (count ? final_mean / count : 0.0) << "\n"
                << "metrics: " << result.metrics_path << "\n";
      return 0;
    }
    if (matrix->parsed()) {
      const uabsim::ExperimentConfig cfg = resolve_config(config_path, profile);
      const uabsim::MatrixResult result = uabsim::run_matrix(cfg, output_dir);
      std::cout << result.runs.size() << " runs completed, "
                << result.failures.size() << " failed\n"
                << "summary: " << result.summary_path << "\n";
      for (const auto& f : result.failures) std::cerr << "failed: " << f << "\n";
      return result.runs.empty() ? 1 : 0;
    }
    if (rep->parsed()) return replay(log_path, output_dir);
    if (val->parsed()) {
      uabsim::load_config(config_path);
      std::cout << "config ok: " << config_path << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
