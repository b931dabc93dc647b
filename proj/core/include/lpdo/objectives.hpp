#pragma once

// Representational entropies of a two-site block under a kraus-space
// isometry.
//
// The block B(s_i, s_{i+1}, chi_l, chi_r, k_i, k_{i+1}) is read as a pure
// state of the purification. V acts on the fused kraus leg c = k_i + K_i k_{i+1}
// (k_i fastest) as B'(..., c') = sum_c B(..., c) V(c, c'). The bipartition is
// (s_i, chi_l, k_i) | (s_{i+1}, chi_r, k_{i+1}); natural log throughout.

#include "lpdo/stiefel.hpp"

namespace lpdo {

struct ObjectiveValue {
  ObjectiveKind kind = ObjectiveKind::s_sr;
  double value = 0.0;
};

class BlockObjective : public StiefelObjective {
 public:
  BlockObjective(const DenseTensor& block, ObjectiveKind kind);

  std::int64_t dim() const override { return kc_; }
  ObjectiveKind kind() const { return kind_; }
  /// No isometry check; scale invariant in V.
  double value(const Matrix& v) const override;
  /// Central differences evaluated through rank-one probe updates of the
  /// bipartition Gram matrix instead of full re-evaluations.
  Matrix gradient(const Matrix& v, double eps) const override;
  bool has_analytic_gradient() const override { return true; }
  /// Chain rule through the bipartition matrix M = M(V):
  ///   S_sr: dM = -4 M M^dagger M / Tr (M M^dagger)^2 + 4 M / ||M||^2
  ///   S_vn: dM = -(2 / ||M||^2) U diag(sigma_i (log p_i + S)) W^dagger
  /// pulled back to V with the block matrix.
  Matrix analytic_gradient(const Matrix& v) const override;

  /// Bipartition matrix of B V, rows (s_i, chi_l, k_i), cols (s_{i+1}, chi_r, k_{i+1}).
  Matrix bipartition(const Matrix& v) const;

 private:
  // Gram-side geometry: we work with G = X^dagger X where X is the
  // bipartition matrix or its transpose, whichever gives the smaller Gram.
  Matrix oriented(const Matrix& v) const;
  // Kraus column a of the block as the (s_i chi_l) x (s_{i+1} chi_r) matrix,
  // oriented like `oriented`.
  Matrix piece(std::int64_t a) const;

  ObjectiveKind kind_;
  std::int64_t d1_, d2_, l_, r_, k1_, k2_, kc_;
  Matrix bm_;  // (s_i s_{i+1} chi_l chi_r) x kc
  bool transposed_ = false;
};

/// -log(Tr rho~^2) of the left half; no SVD. Throws if V is not isometric.
ObjectiveValue objective_s_sr(const DenseTensor& block, const Matrix& v);
/// -sum lambda log lambda from the singular values across the bond.
ObjectiveValue objective_s_vn(const DenseTensor& block, const Matrix& v);
ObjectiveValue evaluate_objective(ObjectiveKind kind, const DenseTensor& block,
                                  const Matrix& v);

/// Block obtained by applying V on the fused kraus leg of a two-site block.
DenseTensor apply_kraus_isometry(const DenseTensor& block, const Matrix& v);

}  // namespace lpdo
