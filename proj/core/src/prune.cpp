#include "lpdo/prune.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "lpdo/measures.hpp"

namespace lpdo {

TruncationPolicy chi_policy(double cutoff, CutoffMode mode) {
  TruncationPolicy p = TruncationPolicy::l2(cutoff);
  p.cutoff_mode = mode;
  return p;
}

LpdoChain truncate_bond(const LpdoChain& chain, std::size_t bond, double cutoff,
                        Absorb absorb, CutoffMode mode) {
  if (bond + 1 >= chain.size())
    throw PreconditionError("truncate_bond: bond " + std::to_string(bond) + " out of range");
  const auto c = chain.center();
  if (!c || (*c != bond && *c != bond + 1))
    throw PreconditionError("truncate_bond: center must sit on the bond");
  const DenseTensor block = two_site_block(chain, bond);
  // The block's rank across the bond is at most the current bond dimension;
  // the cap keeps round-off values from growing it at tiny cutoffs.
  auto policy = chi_policy(cutoff, mode);
  policy.max_rank = chain.bond_dim(bond);
  return split_block(chain, bond, block, policy, absorb).chain;
}

FidelityReference FidelityReference::of(const LpdoChain& chain) {
  return {&chain, lpdo::purity(chain)};
}

SweepStats describe(const LpdoChain& chain, const LpdoChain* reference, int sweep_index) {
  if (!reference) return describe(chain, static_cast<const FidelityReference*>(nullptr), sweep_index);
  const auto ref = FidelityReference::of(*reference);
  return describe(chain, &ref, sweep_index);
}

SweepStats describe(const LpdoChain& chain, const FidelityReference* reference,
                    int sweep_index) {
  SweepStats s;
  s.sweep_index = sweep_index;
  s.chi_mean = chain.chi_mean();
  s.chi_max = chain.chi_max();
  s.trace_deviation = std::abs(trace(chain) - 1.0);
  s.fidelity_vs_initial = reference
                              ? fidelity_p(chain, *reference->chain, reference->purity).fidelity
                                    : std::numeric_limits<double>::quiet_NaN();
  return s;
}

namespace {

SweepResult sweep_impl(const LpdoChain& chain, double cutoff, const FidelityReference* reference,
                       int sweep_index, const SweepOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  LpdoChain cur = canonicalize(chain, 0);
  for (std::size_t b = 0; b + 1 < cur.size(); ++b) cur = truncate_bond(cur, b, cutoff, Absorb::right, options.cutoff_mode);
  if (options.bidirectional)
    for (std::size_t b = cur.size() - 1; b-- > 0;)
      cur = truncate_bond(cur, b, cutoff, Absorb::left, options.cutoff_mode);
  const auto t1 = std::chrono::steady_clock::now();

  SweepResult out{cur, describe(cur, options.measure_fidelity ? reference : nullptr,
                                sweep_index)};
  out.stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

}  // namespace

SweepResult sweep_truncate(const LpdoChain& chain, double cutoff, const LpdoChain* reference,
                           int sweep_index, const SweepOptions& options) {
  if (!reference || !options.measure_fidelity)
    return sweep_impl(chain, cutoff, nullptr, sweep_index, options);
  const auto ref = FidelityReference::of(*reference);
  return sweep_impl(chain, cutoff, &ref, sweep_index, options);
}

SweepResult sweep_truncate(const LpdoChain& chain, double cutoff,
                           const FidelityReference& reference, int sweep_index,
                           const SweepOptions& options) {
  return sweep_impl(chain, cutoff, &reference, sweep_index, options);
}

ScheduleResult run_truncation_schedule(const LpdoChain& chain, double cutoff, int n_sweeps,
                                       const SweepOptions& options) {
  if (n_sweeps < 0) throw PreconditionError("run_truncation_schedule: negative sweep count");
  ScheduleResult out{chain, {}};
  if (n_sweeps == 0) return out;
  FidelityReference ref{&chain, 0.0};
  if (options.measure_fidelity) ref = FidelityReference::of(chain);
  for (int k = 1; k <= n_sweeps; ++k) {
    auto step = sweep_impl(out.chain, cutoff, &ref, k, options);
    out.chain = std::move(step.chain);
    out.series.push_back(step.stats);
  }
  return out;
}

}  // namespace lpdo
