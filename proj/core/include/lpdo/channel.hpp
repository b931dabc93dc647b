#pragma once

#include <string>
#include <vector>

#include "lpdo/chain.hpp"

namespace lpdo {

/// Completely positive trace-preserving map in Kraus form.
struct KrausChannel {
  std::vector<Matrix> operators;
  std::string label;

  /// Frobenius norm of sum_i K_i^dagger K_i - 1.
  double completeness_error() const;
  /// Throws PreconditionError unless the completeness error is <= tol.
  void validate(double tol = 1e-12) const;
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// K0 = sqrt(gamma) X, K1 = sqrt(1 - gamma) 1.
KrausChannel bitflip(double gamma);
/// K0 = sqrt(gamma) Z, K1 = sqrt(1 - gamma) 1.
KrausChannel dephasing(double gamma);
KrausChannel amplitude_damping(double gamma);

/// Applies a single-site channel. The center is moved to the site, the
/// composite (s chi chi) Hermitian PSD operator is eigendecomposed and its
/// kept eigenvalues become the new kraus dimension. `policy` must be L1.
LpdoChain apply_channel(const LpdoChain& chain, std::size_t site,
                        const KrausChannel& channel, const TruncationPolicy& policy);

/// Default kraus-space policy used by channel application.
TruncationPolicy default_kraus_policy();

/// Bitflip then dephasing on every site, left to right.
LpdoChain depolarize_to_lpmm(const LpdoChain& chain, double gamma_d = 0.5,
                             double gamma_b = 0.5,
                             const TruncationPolicy& policy = default_kraus_policy());

}  // namespace lpdo
