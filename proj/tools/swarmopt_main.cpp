#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "swarmopt/output.hpp"
#include "swarmopt/runner.hpp"
#include "swarmopt/scenario.hpp"

namespace {

using swarm::RunResult;
using swarm::RunStatus;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void print_run_summary(const RunResult& res, const swarm::ScenarioConfig& cfg) {
  std::printf("scenario %s (mode %s, p_con %.2f, S %d, tau %d, seed %llu)\n",
              cfg.name.c_str(), cfg.mode.c_str(), cfg.p_con,
              cfg.effective().barrier_S, cfg.effective().delay_bound,
              static_cast<unsigned long long>(cfg.seed));
  std::printf("status %s after %ld commits, virtual time %.2f, wall %.2fs\n",
              res.status == RunStatus::Converged ? "converged" : "cap_hit",
              res.commits, res.virtual_time, res.wall_seconds);
  for (Eigen::Index i = 0; i < res.terminal_times.size(); ++i)
    std::printf("  agent %ld terminal time %.4f s\n", static_cast<long>(i),
                res.terminal_times[i]);
}

int cmd_run(const std::string& scenario_path,
            const std::vector<std::string>& overrides, const std::string& out,
            bool parallel) {
  swarm::ScenarioConfig cfg = swarm::load_scenario(scenario_path, overrides);
  swarm::RunOptions opts;
  opts.threaded = parallel;
  RunResult res = swarm::run_swarm(cfg, opts);
  print_run_summary(res, cfg);
  if (!out.empty()) {
    const std::string dir = swarm::write_results(res, cfg, out);
    std::printf("outputs in %s\n", dir.c_str());
  }
  return res.exit_code();
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_path,
              const std::vector<std::string>& overrides, const std::string& out,
              bool parallel) {
  std::ifstream in(grid_path);
  if (!in) throw swarm::ConfigError("sweep: cannot open grid " + grid_path);
  nlohmann::json grid = nlohmann::json::parse(in, nullptr, false);
  if (grid.is_discarded())
    throw swarm::ConfigError("sweep: malformed grid JSON");

  std::vector<std::uint64_t> seeds;
  for (const auto& s : grid.value("seeds", nlohmann::json::array()))
    seeds.push_back(s.get<std::uint64_t>());
  const int report_agent = grid.value("report_agent", 4);

  struct Row {
    std::string label;
    double flight_time, commits, vtime;
    int failures;
  };
  std::vector<Row> rows;

  const auto& runs = grid.contains("runs") ? grid["runs"] : nlohmann::json::array();
  if (!runs.is_array() || runs.empty()) {
    // empty grid degenerates to a single default run
    swarm::ScenarioConfig cfg = swarm::load_scenario(scenario_path, overrides);
    RunResult res = swarm::run_swarm(cfg, {parallel});
    print_run_summary(res, cfg);
    return res.exit_code();
  }

  for (const auto& entry : runs) {
    std::vector<std::string> ov = overrides;
    for (const auto& s : entry.value("set", nlohmann::json::array()))
      ov.push_back(s.get<std::string>());
    const std::string label = entry.value("label", std::string("run"));

    std::vector<double> times, commits, vtimes;
    int failures = 0;
    std::vector<std::uint64_t> run_seeds = seeds;
    if (run_seeds.empty()) run_seeds.push_back(0);
    for (std::uint64_t seed : run_seeds) {
      std::vector<std::string> ov_seed = ov;
      if (!seeds.empty())
        ov_seed.push_back("protocol.seed=" + std::to_string(seed));
      try {
        swarm::ScenarioConfig cfg = swarm::load_scenario(scenario_path, ov_seed);
        RunResult res = swarm::run_swarm(cfg, {parallel});
        const int idx = std::min<int>(report_agent,
                                      cfg.num_agents() - 1);
        times.push_back(res.terminal_times[idx]);
        commits.push_back(static_cast<double>(res.commits));
        vtimes.push_back(res.virtual_time);
        if (res.status != RunStatus::Converged) ++failures;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "sweep row %s seed %llu failed: %s\n",
                     label.c_str(), static_cast<unsigned long long>(seed),
                     e.what());
        ++failures;
      }
    }
    if (times.empty()) {
      rows.push_back({label, 0, 0, 0, failures});
      continue;
    }
    rows.push_back({label, median(times), median(commits), median(vtimes),
                    failures});
  }

  std::printf("%-28s %14s %10s %14s %9s\n", "label", "flight_time_s", "commits",
              "virtual_time", "failures");
  std::ostringstream csv;
  csv << "label,flight_time_s,commits,virtual_time,failures\n";
  for (const Row& r : rows) {
    std::printf("%-28s %14.4f %10.1f %14.2f %9d\n", r.label.c_str(),
                r.flight_time, r.commits, r.vtime, r.failures);
    csv << r.label << ',' << r.flight_time << ',' << r.commits << ','
        << r.vtime << ',' << r.failures << "\n";
  }
  if (!out.empty()) {
    std::ofstream f(out + "/sweep.csv");
    f << csv.str();
    std::printf("sweep table in %s/sweep.csv\n", out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"communication-aware asynchronous swarm trajectory optimizer"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, mode, grid_path;
  std::uint64_t seed = 0;
  bool seed_set = false, parallel = false;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "optimize one scenario");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--mode", mode, "async|sync");
  run->add_option("--seed", seed, "protocol RNG seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--set", overrides, "dotted-path override key=value");
  run->add_flag("--parallel", parallel, "run worker computes on threads");

  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of overrides");
  sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--grid", grid_path, "grid JSON file")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--set", overrides, "dotted-path override key=value");
  sweep->add_flag("--parallel", parallel, "run worker computes on threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!mode.empty()) overrides.push_back("mode=" + mode);
    if (seed_set) overrides.push_back("protocol.seed=" + std::to_string(seed));
    if (run->parsed())
      return cmd_run(scenario_path, overrides, out_dir, parallel);
    return cmd_sweep(scenario_path, grid_path, overrides, out_dir, parallel);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
