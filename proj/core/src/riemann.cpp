#include "lpdo/riemann.hpp"

#include <chrono>

namespace lpdo {

BondOptimization optimize_bond(const LpdoChain& chain, std::size_t bond, double cutoff,
                               const OptimizerConfig& config, CutoffMode mode) {
  if (bond + 1 >= chain.size())
    throw PreconditionError("optimize_bond: bond " + std::to_string(bond) + " out of range");
  const auto c = chain.center();
  if (!c || (*c != bond && *c != bond + 1))
    throw PreconditionError("optimize_bond: center must sit on the bond");

  const DenseTensor block = two_site_block(chain, bond);
  const BlockObjective objective(block, config.objective);
  const IsometryResult opt = optimize_isometry(objective, config);

  BondOptimization out;
  out.chi_before = chain.bond_dim(bond);
  out.objective_before = objective.value(Matrix::Identity(objective.dim(), objective.dim()));
  out.objective_after = opt.trace.back();
  out.iterations = opt.iterations;
  for (std::size_t j = 1; j < opt.trace.size(); ++j)
    if (opt.trace[j] > opt.trace[j - 1]) out.monotone = false;
  // A restart that ends worse than the identity is never applied.
  Matrix v = opt.point.v;
  if (out.objective_after > out.objective_before) {
    v = Matrix::Identity(objective.dim(), objective.dim());
    out.objective_after = out.objective_before;
  }
  // V acts on kraus legs only, so the rank across the bond cannot grow.
  auto policy = chi_policy(cutoff, mode);
  policy.max_rank = chain.bond_dim(bond);
  out.chain = split_block(chain, bond, apply_kraus_isometry(block, v), policy, Absorb::right).chain;
  out.chi_after = out.chain.bond_dim(bond);
  out.v = std::move(v);
  return out;
}

RiemannResult riemann_sweep(const LpdoChain& chain, double cutoff,
                            const OptimizerConfig& config, int n_sweeps,
                            const SweepOptions& options) {
  if (n_sweeps < 0) throw PreconditionError("riemann_sweep: negative sweep count");
  config.validate();
  RiemannResult out{chain, {}};
  if (n_sweeps == 0) return out;
  FidelityReference ref{&chain, 0.0};
  if (options.measure_fidelity) ref = FidelityReference::of(chain);
  for (int k = 1; k <= n_sweeps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    RiemannSweepStats st;
    st.objective = config.objective;
    LpdoChain cur = canonicalize(out.chain, 0);
    for (std::size_t b = 0; b + 1 < cur.size(); ++b) {
      BondOptimization step = optimize_bond(cur, b, cutoff, config, options.cutoff_mode);
      st.objective_before += step.objective_before;
      st.objective_after += step.objective_after;
      st.optimizer_iters += step.iterations;
      st.monotone = st.monotone && step.monotone;
      cur = std::move(step.chain);
    }
    const auto t1 = std::chrono::steady_clock::now();
    static_cast<SweepStats&>(st) =
        describe(cur, options.measure_fidelity ? &ref : nullptr, k);
    st.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.chain = std::move(cur);
    out.series.push_back(st);
  }
  return out;
}

}  // namespace lpdo
