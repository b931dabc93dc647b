#pragma once

#include "lpdo/chain.hpp"

namespace lpdo {

/// Tr rho by transfer contraction.
double trace(const LpdoChain& chain);
/// Tr rho^2 by transfer contraction.
double purity(const LpdoChain& chain);
/// Tr[rho_a rho_b]; chains must have equal length.
double overlap(const LpdoChain& a, const LpdoChain& b);

struct FidelityReport {
  double overlap = 0.0;
  double purity_f = 0.0;
  double purity_i = 0.0;
  /// Tr[rho_f rho_i] / max(P(rho_f), P(rho_i)).
  double fidelity = 0.0;
};

FidelityReport fidelity_p(const LpdoChain& final_state, const LpdoChain& initial_state);
/// Same with Tr rho_i^2 supplied; the purity ring is the expensive part at large chi.
FidelityReport fidelity_p(const LpdoChain& final_state, const LpdoChain& initial_state,
                          double initial_purity);

}  // namespace lpdo
