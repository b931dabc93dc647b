#pragma once

// Brute-force density matrices for small chains.
//
// Basis convention: qubit 0 (site 0) is the most significant bit of the
// 2^N-dimensional index. Everything here works on raw site data and plain
// loops so it stays independent of the tensor contraction code.

#include <cstddef>
#include <vector>

#include "lpdo/chain.hpp"
#include "lpdo/channel.hpp"

namespace lpdo::oracle {

inline constexpr std::size_t kMaxQubits = 12;

struct DenseRho {
  std::size_t n_qubits = 0;
  Matrix matrix;

  double trace() const { return matrix.trace().real(); }
  double hermiticity_error() const { return (matrix - matrix.adjoint()).norm(); }
  double min_eigenvalue() const;
};

/// 1/2^N identity.
DenseRho maximally_mixed(std::size_t n_qubits);

/// rho = A A^dagger contracted exactly. Throws ResourceError above `max_qubits`.
DenseRho lpdo_to_dense(const LpdoChain& chain, std::size_t max_qubits = kMaxQubits);

/// U rho U^dagger with U acting on consecutive `sites` (big-endian).
DenseRho dense_apply(const DenseRho& rho, const Matrix& u, const std::vector<std::size_t>& sites);
/// sum_i K_i rho K_i^dagger on one site.
DenseRho dense_apply(const DenseRho& rho, const KrausChannel& channel, std::size_t site);

/// Embeds a k-site operator on consecutive sites starting at `first`.
Matrix embed(const Matrix& op, std::size_t first, std::size_t n_qubits);

struct DenseMeasures {
  double trace_a = 0.0;
  double trace_b = 0.0;
  double purity_a = 0.0;
  double purity_b = 0.0;
  double overlap = 0.0;
  double fidelity = 0.0;
};

DenseMeasures dense_measures(const DenseRho& a, const DenseRho& b);

/// -sum p log p over the eigenvalues of rho (natural log).
double von_neumann_entropy(const Matrix& rho);
/// Entanglement entropy of a pure state across (first `left_dim`) | rest,
/// where the left factor is the slower-varying one.
double bipartite_entropy(const Vector& psi, std::int64_t left_dim);

}  // namespace lpdo::oracle
