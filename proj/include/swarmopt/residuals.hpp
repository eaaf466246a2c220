#pragma once

#include <array>
#include <string>
#include <vector>

#include "swarmopt/types.hpp"

namespace swarm {

/// Index order of the five consensus couplings tracked by the stopping
/// rule: control, state, time, stacked state copies, stacked time copies.
enum ResidualKey { kU = 0, kX, kT, kXa, kTa, kResidualKeys };

/// Global residual norms at one master commit, with the ingredients of
/// their thresholds. A negative norm means the quantity was not yet
/// available (cold start).
struct ResidualReport {
  long iteration = -1;
  std::array<double, kResidualKeys> primal{};     // ||r^p||
  std::array<double, kResidualKeys> dual{};       // ||r^d||
  std::array<double, kResidualKeys> rel_primal{}; // max of variable norms
  std::array<double, kResidualKeys> rel_dual{};   // stacked dual norm
  std::array<double, kResidualKeys> dims{};       // vector dimension
  bool complete = false;  // all workers contributed at least twice

  double primal_threshold(int key, double eps_abs, double eps_rel) const;
  double dual_threshold(int key, double eps_abs, double eps_rel) const;
};

/// Sums per-agent squared components into the ten global norms. The
/// z/s change terms are supplied by the caller (the master owns them).
ResidualReport assemble_residuals(
    const std::vector<ResidualComponents>& components,
    const Penalties& penalties, double za_change_sq, double za_norm_sq,
    double sa_change_sq, double sa_norm_sq,
    const std::array<double, kResidualKeys>& dims, long iteration);

/// True iff all ten inequalities of the stopping rule hold.
bool check_stop(const ResidualReport& report, double eps_abs, double eps_rel);

std::string residual_csv_header();
std::string residual_csv_row(const ResidualReport& report, double eps_abs,
                             double eps_rel);

}  // namespace swarm
