#pragma once

// Fidelity-preserving truncation of spurious bond dimension.

#include <cstdint>
#include <optional>
#include <vector>

#include "lpdo/chain.hpp"

namespace lpdo {

struct SweepStats {
  int sweep_index = 0;
  double chi_mean = 1.0;
  std::int64_t chi_max = 1;
  /// F_P against the reference chain (NaN when no reference was given).
  double fidelity_vs_initial = 0.0;
  /// |Tr rho - 1|.
  double trace_deviation = 0.0;
  double wall_ms = 0.0;
};

struct SweepOptions {
  /// Adds a right-to-left pass after the left-to-right one.
  bool bidirectional = false;
  /// Skip F_P when false (it dominates the cost on long chains).
  bool measure_fidelity = true;
  CutoffMode cutoff_mode = CutoffMode::relative_value;
};

/// Chain that fidelities are measured against, with its purity cached.
struct FidelityReference {
  const LpdoChain* chain = nullptr;
  double purity = 0.0;

  static FidelityReference of(const LpdoChain& chain);
};

/// L2, unit-norm policy used for chi-space truncation.
TruncationPolicy chi_policy(double cutoff, CutoffMode mode = CutoffMode::relative_value);

/// Two-site SVD at `bond` with an L2 relative cutoff; the kept spectrum is
/// merged toward `absorb`. Requires the center at bond or bond + 1.
LpdoChain truncate_bond(const LpdoChain& chain, std::size_t bond, double cutoff,
                        Absorb absorb = Absorb::right,
                        CutoffMode mode = CutoffMode::relative_value);

struct SweepResult {
  LpdoChain chain;
  SweepStats stats;
};

/// Canonicalizes to site 0, then truncates bonds 0..N-2 left to right.
/// `reference` is the chain fidelity is measured against.
SweepResult sweep_truncate(const LpdoChain& chain, double cutoff,
                           const LpdoChain* reference = nullptr, int sweep_index = 1,
                           const SweepOptions& options = {});
SweepResult sweep_truncate(const LpdoChain& chain, double cutoff,
                           const FidelityReference& reference, int sweep_index = 1,
                           const SweepOptions& options = {});

struct ScheduleResult {
  LpdoChain chain;
  std::vector<SweepStats> series;
};

/// `n_sweeps` consecutive sweeps; fidelity is measured against the input.
ScheduleResult run_truncation_schedule(const LpdoChain& chain, double cutoff, int n_sweeps,
                                       const SweepOptions& options = {});

/// Stats of a chain without timing (sweep index 0).
SweepStats describe(const LpdoChain& chain, const LpdoChain* reference, int sweep_index = 0);
SweepStats describe(const LpdoChain& chain, const FidelityReference* reference,
                    int sweep_index = 0);

}  // namespace lpdo
