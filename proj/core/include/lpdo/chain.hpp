#pragma once

// Locally purified density operator on an open chain.
//
// Site i holds a tensor A(i) with indices, in this order:
//   (physical s_i, left bond chi_{i-1}, right bond chi_i, kraus kappa_i)
// and the represented operator is rho = sum_kappa A A^dagger. Boundary bonds
// have dimension 1. Bonds are numbered 0..N-2, bond i joining sites i, i+1.
// Multi-site physical operators use the big-endian convention: the lowest
// site is the most significant digit of the fused physical index. Fused
// kraus legs are the opposite: the lowest site varies fastest.

#include <cstdint>
#include <optional>
#include <vector>

#include "lpdo/tensor.hpp"

namespace lpdo {

class LpdoChain {
 public:
  LpdoChain() = default;
  /// Validates the index structure; see class comment.
  LpdoChain(std::vector<DenseTensor> sites, std::optional<std::size_t> center,
            std::int64_t local_dim = 2);

  std::size_t size() const { return sites_.size(); }
  std::int64_t local_dim() const { return local_dim_; }
  std::optional<std::size_t> center() const { return center_; }

  const DenseTensor& site(std::size_t i) const { return sites_.at(i); }
  const std::vector<DenseTensor>& sites() const { return sites_; }

  const Index& physical(std::size_t i) const { return sites_.at(i).index(0); }
  const Index& left(std::size_t i) const { return sites_.at(i).index(1); }
  const Index& right(std::size_t i) const { return sites_.at(i).index(2); }
  const Index& kraus(std::size_t i) const { return sites_.at(i).index(3); }

  std::int64_t bond_dim(std::size_t bond) const { return right(bond).dim; }
  std::int64_t kraus_dim(std::size_t i) const { return kraus(i).dim; }
  std::vector<std::int64_t> bond_dims() const;
  std::vector<std::int64_t> kraus_dims() const;
  /// Arithmetic mean of the N-1 bond dims (1 for a single site).
  double chi_mean() const;
  std::int64_t chi_max() const;

  /// Replaces site i. The new tensor is permuted into canonical order and
  /// must share bond ids with its neighbors.
  void set_site(std::size_t i, DenseTensor t);
  /// Replaces sites i and i+1 together (their shared bond may change).
  void set_pair(std::size_t i, DenseTensor left_site, DenseTensor right_site);
  void set_center(std::optional<std::size_t> c) { center_ = c; }

  /// Throws DimensionError if the structural invariants are broken.
  void validate() const;

  /// Bitwise equality of dims and data (index ids are not compared).
  bool same_values(const LpdoChain& other) const;

 private:
  std::vector<DenseTensor> sites_;
  std::optional<std::size_t> center_;
  std::int64_t local_dim_ = 2;
};

/// Puts a site tensor into the canonical (s, left, right, kraus) order.
DenseTensor canonical_site(const DenseTensor& t, const Index& s, const Index& l,
                           const Index& r, const Index& k);

/// Site tensor from raw data laid out with s fastest, then left, right, kraus.
DenseTensor make_site(const Index& s, const Index& l, const Index& r, const Index& k,
                      std::vector<cplx> data);

/// Optimal maximally mixed chain: every site (1/sqrt2) delta(s, kappa),
/// all bonds 1, all kraus dims 2.
LpdoChain build_optimal_lpmm(std::size_t n_sites);

/// Random pure chain (kappa = 1) with bond dims min(chi_max, 2^i, 2^{N-i}),
/// left-isometrized and globally normalized. Deterministic in the seed.
LpdoChain build_random_pure(std::size_t n_sites, std::int64_t chi_max,
                            std::uint64_t seed);

/// Product of single-qubit pure states, one 2-vector per site.
LpdoChain build_product_pure(const std::vector<Vector>& states);

/// Gauge transformation putting the orthogonality center at `center`.
LpdoChain canonicalize(const LpdoChain& chain, std::size_t center);

/// Moves an existing center; falls back to a full canonicalization.
LpdoChain move_center(const LpdoChain& chain, std::size_t center);

/// Contracted two-site block around bond i with indices
/// (s_i, s_{i+1}, chi_{i-1}, chi_{i+1}, kappa_i, kappa_{i+1}).
/// Requires the center at i or i+1.
DenseTensor two_site_block(const LpdoChain& chain, std::size_t bond);

enum class Absorb {
  right,  ///< spectrum merged into site i+1, center ends at i+1
  left    ///< spectrum merged into site i, center ends at i
};

/// Splits a block (as produced by two_site_block, possibly with relabeled
/// kraus legs) back into sites i, i+1 with an L2 truncation.
struct SplitReport {
  LpdoChain chain;
  std::vector<double> spectrum;
  double discarded_weight = 0.0;
};
SplitReport split_block(const LpdoChain& chain, std::size_t bond, const DenseTensor& block,
                        const TruncationPolicy& policy, Absorb absorb = Absorb::right);

/// Applies a 2x2 unitary to one site. Only the tensor changes.
LpdoChain apply_unitary(const LpdoChain& chain, std::size_t site, const Matrix& u);

/// Applies a 4x4 unitary to the adjacent sites (a, b); row/column index of
/// `u` is 2*s_a + s_b. The bond is restored by an L2 truncation with
/// `policy` (kept spectrum renormalized to unit trace).
LpdoChain apply_unitary(const LpdoChain& chain, std::size_t a, std::size_t b,
                        const Matrix& u, const TruncationPolicy& policy);

/// Tensor of a matrix acting on fused legs. `out` and `in` are listed
/// most-significant first; the result carries (out..., in...).
DenseTensor operator_tensor(const Matrix& m, const std::vector<Index>& out,
                            const std::vector<Index>& in);

bool is_unitary(const Matrix& u, double tol = 1e-12);

}  // namespace lpdo
