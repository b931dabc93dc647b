#pragma once

// Bond pruning with a kraus-space isometry found by Riemannian descent.

#include <vector>

#include "lpdo/objectives.hpp"
#include "lpdo/prune.hpp"

namespace lpdo {

struct BondOptimization {
  LpdoChain chain;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int iterations = 0;
  /// Objective non-increasing over the accepted iterates.
  bool monotone = true;
  std::int64_t chi_before = 1;
  std::int64_t chi_after = 1;
  Matrix v;
};

/// Contract bond i, optimize V on the fused kraus leg, apply it, truncate
/// with an L2 relative cutoff and split (center ends at i + 1).
BondOptimization optimize_bond(const LpdoChain& chain, std::size_t bond, double cutoff,
                               const OptimizerConfig& config,
                               CutoffMode mode = CutoffMode::relative_value);

struct RiemannSweepStats : SweepStats {
  ObjectiveKind objective = ObjectiveKind::s_sr;
  /// Sums over the bonds of one sweep.
  double objective_before = 0.0;
  double objective_after = 0.0;
  int optimizer_iters = 0;
  bool monotone = true;
};

struct RiemannResult {
  LpdoChain chain;
  std::vector<RiemannSweepStats> series;
};

/// `n_sweeps` left-to-right passes of optimize_bond, each starting from a
/// center at site 0. Fidelity is measured against the input chain.
RiemannResult riemann_sweep(const LpdoChain& chain, double cutoff,
                            const OptimizerConfig& config, int n_sweeps,
                            const SweepOptions& options = {});

}  // namespace lpdo
