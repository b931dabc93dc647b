#include "lpdo/measures.hpp"

#include <algorithm>
#include <vector>

namespace lpdo {

namespace {

// Copy of a site tensor with new labels (s, l, r, k), optionally conjugated.
DenseTensor layer(const DenseTensor& site, const Index& s, const Index& l, const Index& r,
                  const Index& k, bool conjugate) {
  std::vector<cplx> data(site.data().begin(), site.data().end());
  if (conjugate)
    for (auto& v : data) v = std::conj(v);
  return DenseTensor({s, l, r, k}, std::move(data));
}

Index like(const Index& ix) { return Index::make(ix.dim, ix.role); }

}  // namespace

double trace(const LpdoChain& chain) {
  // Two layers, A and conj(A), sharing s and kappa.
  Index e1 = Index::make(1, IndexRole::bond), e2 = Index::make(1, IndexRole::bond);
  DenseTensor env({e1, e2}, {1.0});
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& a = chain.site(i);
    const Index s = like(a.index(0)), k = like(a.index(3));
    const Index r1 = like(a.index(2)), r2 = like(a.index(2));
    env = contract(env, layer(a, s, e1, r1, k, false));
    env = contract(env, layer(a, s, e2, r2, k, true));
    e1 = r1;
    e2 = r2;
  }
  return env.data()[0].real();
}

double overlap(const LpdoChain& a, const LpdoChain& b) {
  if (a.size() != b.size()) throw DimensionError("overlap: chains differ in length");
  // Tr[rho_a rho_b] as a ring of four layers per site:
  //   A(s, k)  conj A(s', k)  B(s', q)  conj B(s, q)
  std::vector<Index> e;
  for (int j = 0; j < 4; ++j) e.push_back(Index::make(1, IndexRole::bond));
  DenseTensor env({e[0], e[1], e[2], e[3]}, {1.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& ta = a.site(i);
    const auto& tb = b.site(i);
    if (ta.index(0).dim != tb.index(0).dim)
      throw DimensionError("overlap: physical dimensions differ");
    const Index s = like(ta.index(0)), s2 = like(ta.index(0));
    const Index k = like(ta.index(3)), q = like(tb.index(3));
    const std::vector<Index> r{like(ta.index(2)), like(ta.index(2)), like(tb.index(2)),
                               like(tb.index(2))};
    env = contract(env, layer(ta, s, e[0], r[0], k, false));
    env = contract(env, layer(ta, s2, e[1], r[1], k, true));
    env = contract(env, layer(tb, s2, e[2], r[2], q, false));
    env = contract(env, layer(tb, s, e[3], r[3], q, true));
    e = r;
  }
  return env.data()[0].real();
}

double purity(const LpdoChain& chain) { return overlap(chain, chain); }

FidelityReport fidelity_p(const LpdoChain& final_state, const LpdoChain& initial_state) {
  if (final_state.size() != initial_state.size())
    throw DimensionError("fidelity_p: chains differ in length");
  return fidelity_p(final_state, initial_state, purity(initial_state));
}

FidelityReport fidelity_p(const LpdoChain& final_state, const LpdoChain& initial_state,
                          double initial_purity) {
  if (final_state.size() != initial_state.size())
    throw DimensionError("fidelity_p: chains differ in length");
  FidelityReport rep;
  rep.overlap = overlap(final_state, initial_state);
  rep.purity_f = purity(final_state);
  rep.purity_i = initial_purity;
  rep.fidelity = rep.overlap / std::max(rep.purity_f, rep.purity_i);
  return rep;
}

}  // namespace lpdo
