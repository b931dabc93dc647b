#include "lpdo/injectivity.hpp"

#include <cmath>

#include "lpdo/measures.hpp"
#include "lpdo/objectives.hpp"

namespace lpdo {

namespace {

int qubit_count(const Matrix& u) {
  int m = 0;
  while ((std::int64_t{1} << m) < u.rows()) ++m;
  if ((std::int64_t{1} << m) != u.rows() || u.rows() != u.cols() || m < 1)
    throw DimensionError("operator size is not a power of two");
  return m;
}

std::int64_t reverse_bits(std::int64_t x, int n) {
  std::int64_t out = 0;
  for (int j = 0; j < n; ++j) out |= ((x >> j) & 1) << (n - 1 - j);
  return out;
}

}  // namespace

Disentangler disentangler_for(const Matrix& u) {
  qubit_count(u);
  if (!is_unitary(u)) throw PreconditionError("disentangler_for: operator is not unitary");
  return {u, 0.0};
}

InjectivityWitness check_weak_injectivity(const Matrix& u) {
  const int m = qubit_count(u);
  const Disentangler d = disentangler_for(u);
  const std::int64_t dim = std::int64_t{1} << m;
  const Matrix a = Matrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim));
  const Matrix lhs = u * a;
  const Matrix rhs = a * d.v;
  // argmin_phi ||lhs - e^{i phi} rhs|| is the argument of <rhs, lhs>.
  const cplx ip = (rhs.adjoint() * lhs).trace();
  const double phase = std::abs(ip) > 0.0 ? std::arg(ip) : 0.0;
  InjectivityWitness w;
  w.u = u;
  w.v = d.v;
  w.phase = phase;
  w.residual = (lhs - std::polar(1.0, phase) * rhs).norm();
  return w;
}

Matrix to_kraus_order(const Matrix& big_endian, int n_legs) {
  if (big_endian.rows() != (std::int64_t{1} << n_legs) || big_endian.cols() != big_endian.rows())
    throw DimensionError("to_kraus_order: operator size does not match the leg count");
  Matrix out(big_endian.rows(), big_endian.cols());
  for (std::int64_t i = 0; i < out.rows(); ++i)
    for (std::int64_t j = 0; j < out.cols(); ++j)
      out(reverse_bits(i, n_legs), reverse_bits(j, n_legs)) = big_endian(i, j);
  return out;
}

LpdoChain apply_kappa_isometry(const LpdoChain& chain, const std::vector<std::size_t>& sites,
                               const Matrix& v, const TruncationPolicy& policy) {
  if (!is_unitary(v, 1e-10))
    throw PreconditionError("apply_kappa_isometry: V must be unitary on the fused legs");
  if (sites.size() == 1) {
    const std::size_t i = sites[0];
    if (i >= chain.size()) throw PreconditionError("apply_kappa_isometry: site out of range");
    const auto& a = chain.site(i);
    const std::int64_t k = a.index(3).dim;
    if (v.rows() != k) throw DimensionError("apply_kappa_isometry: V does not match kappa");
    const std::int64_t rows = static_cast<std::int64_t>(a.size()) / k;
    const Matrix out = Eigen::Map<const Matrix>(a.data().data(), rows, k) * v;
    LpdoChain res = chain;
    res.set_site(i, DenseTensor(a.indices(),
                                std::vector<cplx>(out.data(), out.data() + out.size())));
    return res;
  }
  if (sites.size() != 2 || sites[1] != sites[0] + 1 || sites[1] >= chain.size())
    throw PreconditionError("apply_kappa_isometry: expects one site or an adjacent pair");
  const std::size_t bond = sites[0];
  const LpdoChain centered = move_center(chain, bond);
  const DenseTensor block = two_site_block(centered, bond);
  if (v.rows() != block.index(4).dim * block.index(5).dim)
    throw DimensionError("apply_kappa_isometry: V does not match the fused kappa");
  return split_block(centered, bond, apply_kraus_isometry(block, v), policy).chain;
}

void require_optimal_lpmm(const LpdoChain& chain, double tol) {
  for (auto chi : chain.bond_dims())
    if (chi != 1) throw PreconditionError("chain is not the optimal LPMM: bond dim > 1");
  for (auto k : chain.kraus_dims())
    if (k != 2) throw PreconditionError("chain is not the optimal LPMM: kraus dim != 2");
  const double f = fidelity_p(chain, build_optimal_lpmm(chain.size())).fidelity;
  if (std::abs(f - 1.0) > tol)
    throw PreconditionError("chain is not the optimal LPMM: F_P = " + std::to_string(f));
}

InjectivityRun prune_via_injectivity(const LpdoChain& chain, const Matrix& u,
                                     std::size_t first, double cutoff) {
  require_optimal_lpmm(chain);
  const int m = qubit_count(u);
  if (m > 2) throw PreconditionError("prune_via_injectivity: only 1- and 2-qubit unitaries");
  if (first + static_cast<std::size_t>(m) > chain.size())
    throw PreconditionError("prune_via_injectivity: unitary does not fit on the chain");
  const Disentangler d = disentangler_for(u);
  const TruncationPolicy policy = TruncationPolicy::l2(cutoff);

  InjectivityRun run;
  run.chi_initial = chain.bond_dims();
  run.after_unitary = m == 1 ? apply_unitary(chain, first, u)
                             : apply_unitary(chain, first, first + 1, u, policy);
  run.chi_after_unitary = run.after_unitary.bond_dims();
  std::vector<std::size_t> sites{first};
  if (m == 2) sites.push_back(first + 1);
  run.final_chain = apply_kappa_isometry(run.after_unitary, sites,
                                         to_kraus_order(d.v.adjoint(), m), policy);
  run.chi_final = run.final_chain.bond_dims();
  run.witness = check_weak_injectivity(u);
  run.fidelity = fidelity_p(run.final_chain, chain).fidelity;
  return run;
}

}  // namespace lpdo
