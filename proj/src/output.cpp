#include "swarmopt/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace swarm {

namespace {

std::ofstream open_or_throw(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

}  // namespace

std::string write_results(const RunResult& result, const ScenarioConfig& config,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path run_dir = fs::path(out_dir) /
                           (config.name + "_seed" + std::to_string(config.seed));
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) throw IoError("cannot create " + run_dir.string());

  {
    std::ofstream out = open_or_throw(run_dir / "trajectories.csv");
    out << "agent,step,time_s,x_m,y_m,heading_rad,control_radps\n";
    char line[256];
    for (size_t i = 0; i < result.trajectories.size(); ++i) {
      const Trajectory& t = result.trajectories[i];
      const int n = t.horizon();
      const double dt = t.terminal_time / n;
      for (int k = 0; k <= n; ++k) {
        if (k < n)
          std::snprintf(line, sizeof(line),
                        "%zu,%d,%.9f,%.9f,%.9f,%.9f,%.9f\n", i, k, k * dt,
                        t.states(0, k), t.states(1, k), t.states(2, k),
                        t.controls(0, k));
        else
          std::snprintf(line, sizeof(line), "%zu,%d,%.9f,%.9f,%.9f,%.9f,\n", i,
                        k, k * dt, t.states(0, k), t.states(1, k),
                        t.states(2, k));
        out << line;
      }
    }
  }

  {
    std::ofstream out = open_or_throw(run_dir / "residuals.csv");
    out << residual_csv_header() << "\n";
    for (const ResidualReport& r : result.history)
      out << residual_csv_row(r, config.eps_abs, config.eps_rel) << "\n";
  }

  {
    std::ofstream out = open_or_throw(run_dir / "summary.txt");
    char line[256];
    out << "scenario " << config.name << "\n";
    out << "mode " << config.mode << "\n";
    out << "seed " << config.seed << "\n";
    out << "status "
        << (result.status == RunStatus::Converged ? "converged" : "cap_hit")
        << "\n";
    out << "degraded " << (result.any_degraded ? 1 : 0) << "\n";
    out << "commits " << result.commits << "\n";
    std::snprintf(line, sizeof(line), "virtual_time %.9f\n",
                  result.virtual_time);
    out << line;
    for (Eigen::Index i = 0; i < result.terminal_times.size(); ++i) {
      std::snprintf(line, sizeof(line), "terminal_time_agent%ld %.6f\n",
                    static_cast<long>(i), result.terminal_times[i]);
      out << line;
    }
    for (size_t i = 0; i < result.worker_clocks.size(); ++i) {
      std::snprintf(line, sizeof(line), "worker_clock_agent%zu %ld\n", i,
                    result.worker_clocks[i]);
      out << line;
    }
    std::snprintf(line, sizeof(line), "p_con %.6f\n", config.p_con);
    out << line;
    out << "barrier_s " << config.effective().barrier_S << "\n";
    out << "delay_bound " << config.effective().delay_bound << "\n";
    out << "horizon_steps " << config.horizon_steps << "\n";
  }

  {
    std::ofstream out = open_or_throw(run_dir / "events.log");
    result.trace.write(out);
  }
  return run_dir.string();
}

}  // namespace swarm
