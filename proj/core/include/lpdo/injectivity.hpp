#pragma once

// Kraus-space gauge isometries and the closed-form disentangler of the
// optimal maximally mixed chain.
//
// For the optimal site tensor A = 1/sqrt2 (s <- kappa) and any m-qubit
// unitary U, U A^{(x)m} = A^{(x)m} U, so U on the physical legs is undone by
// U^dagger on the fused kraus legs.

#include <cstdint>
#include <vector>

#include "lpdo/chain.hpp"

namespace lpdo {

struct Disentangler {
  /// V = e^{-i phase} U, big-endian like U.
  Matrix v;
  double phase = 0.0;
};

/// V = U with phase 0. Throws PreconditionError if U is not unitary.
Disentangler disentangler_for(const Matrix& u);

struct InjectivityWitness {
  Matrix u;
  Matrix v;
  /// Phase minimizing the residual.
  double phase = 0.0;
  /// min_phi || U A - e^{i phi} A V ||_F over LPMM tensors.
  double residual = 0.0;
};

InjectivityWitness check_weak_injectivity(const Matrix& u);

/// Reorders a big-endian operator on `n_legs` qubit legs so that the first
/// leg varies fastest (the fused kraus convention).
Matrix to_kraus_order(const Matrix& big_endian, int n_legs);

/// A -> A V on the fused kraus legs of one site or of an adjacent pair
/// (first site fastest). V must be unitary. For a pair the block is split
/// again with `policy`; the center ends on the right site.
LpdoChain apply_kappa_isometry(const LpdoChain& chain, const std::vector<std::size_t>& sites,
                               const Matrix& v, const TruncationPolicy& policy);

struct InjectivityRun {
  LpdoChain after_unitary;
  LpdoChain final_chain;
  std::vector<std::int64_t> chi_initial;
  std::vector<std::int64_t> chi_after_unitary;
  std::vector<std::int64_t> chi_final;
  InjectivityWitness witness;
  double fidelity = 0.0;
};

/// Applies U (2x2 or 4x4) at `first`, then U^dagger on the kraus legs and
/// an L2 truncation with `cutoff`. Requires the optimal chain.
InjectivityRun prune_via_injectivity(const LpdoChain& chain, const Matrix& u,
                                     std::size_t first, double cutoff);

/// Throws PreconditionError unless the chain is the optimal maximally mixed
/// representation (chi = 1, kappa = 2, F_P = 1 within tol).
void require_optimal_lpmm(const LpdoChain& chain, double tol = 1e-10);

}  // namespace lpdo
