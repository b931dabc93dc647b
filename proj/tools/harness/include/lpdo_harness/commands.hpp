#pragma once

// lpdo gen|prune|riemann|inject|fit|verify
//
// Exit codes: 0 pass, 1 invariant failure, 2 usage error, 3 I/O error.

#include <ostream>

#include "lpdo_harness/config.hpp"

namespace lpdo::harness {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// prune CSV: run_id, N, chi_max, lambda, sweep, chi_mean, chi_max_bond,
/// fidelity_vs_initial, trace_dev, wall_ms
extern const std::vector<std::string> kPruneColumns;
/// prune columns + objective_kind, objective_before, objective_after, optimizer_iters
extern const std::vector<std::string> kRiemannColumns;
/// alpha, beta, gamma, sigma_alpha, sigma_beta, sigma_gamma, residual_norm, converged
extern const std::vector<std::string> kFitColumns;

int cmd_gen(const ExperimentConfig& config, std::ostream& out);
int cmd_prune(const ExperimentConfig& config, std::ostream& out);
int cmd_riemann(const ExperimentConfig& config, std::ostream& out);
int cmd_inject(const ExperimentConfig& config, std::ostream& out);
int cmd_fit(const ExperimentConfig& config, std::ostream& out);
int cmd_verify(const ExperimentConfig& config, std::ostream& out);

/// Dispatches on config.experiment; maps exceptions to exit codes.
int dispatch(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full CLI entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lpdo::harness
