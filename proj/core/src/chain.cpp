#include "lpdo/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lpdo {

LpdoChain::LpdoChain(std::vector<DenseTensor> sites, std::optional<std::size_t> center,
                     std::int64_t local_dim)
    : sites_(std::move(sites)), center_(center), local_dim_(local_dim) {
  validate();
}

std::vector<std::int64_t> LpdoChain::bond_dims() const {
  std::vector<std::int64_t> dims;
  for (std::size_t b = 0; b + 1 < size(); ++b) dims.push_back(bond_dim(b));
  return dims;
}

std::vector<std::int64_t> LpdoChain::kraus_dims() const {
  std::vector<std::int64_t> dims;
  for (std::size_t i = 0; i < size(); ++i) dims.push_back(kraus_dim(i));
  return dims;
}

double LpdoChain::chi_mean() const {
  if (size() < 2) return 1.0;
  const auto dims = bond_dims();
  return static_cast<double>(std::accumulate(dims.begin(), dims.end(), std::int64_t{0})) /
         static_cast<double>(dims.size());
}

std::int64_t LpdoChain::chi_max() const {
  std::int64_t m = 1;
  for (auto d : bond_dims()) m = std::max(m, d);
  return m;
}

void LpdoChain::validate() const {
  if (sites_.empty()) throw DimensionError("chain has no sites");
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& t = sites_[i];
    if (t.rank() != 4)
      throw DimensionError("site " + std::to_string(i) + " must have rank 4");
    if (t.index(0).dim != local_dim_)
      throw DimensionError("site " + std::to_string(i) + " physical dim mismatch");
    if (i + 1 < sites_.size()) {
      const auto& r = t.index(2);
      const auto& l = sites_[i + 1].index(1);
      if (!(r == l))
        throw DimensionError("sites " + std::to_string(i) + " and " +
                             std::to_string(i + 1) + " do not share their bond");
    }
  }
  if (sites_.front().index(1).dim != 1 || sites_.back().index(2).dim != 1)
    throw DimensionError("boundary bonds must have dimension 1");
  if (center_ && *center_ >= sites_.size())
    throw DimensionError("orthogonality center out of range");
}

void LpdoChain::set_site(std::size_t i, DenseTensor t) {
  if (t.rank() != 4) throw DimensionError("site tensor must have rank 4");
  if (!(t.index(1) == left(i)) || !(t.index(2) == right(i)))
    throw DimensionError("set_site: bond indices must be preserved");
  if (t.index(0).dim != local_dim_) throw DimensionError("set_site: physical dim");
  sites_.at(i) = std::move(t);
}

void LpdoChain::set_pair(std::size_t i, DenseTensor a, DenseTensor b) {
  if (i + 1 >= size()) throw DimensionError("set_pair: bond out of range");
  if (a.rank() != 4 || b.rank() != 4) throw DimensionError("site tensor must have rank 4");
  if (!(a.index(1) == left(i)) || !(b.index(2) == right(i + 1)) ||
      !(a.index(2) == b.index(1)))
    throw DimensionError("set_pair: inconsistent bond indices");
  sites_[i] = std::move(a);
  sites_[i + 1] = std::move(b);
}

bool LpdoChain::same_values(const LpdoChain& other) const {
  if (size() != other.size() || center_ != other.center_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& a = sites_[i];
    const auto& b = other.sites_[i];
    for (std::size_t k = 0; k < 4; ++k)
      if (a.index(k).dim != b.index(k).dim) return false;
    if (!std::equal(a.data().begin(), a.data().end(), b.data().begin())) return false;
  }
  return true;
}

DenseTensor canonical_site(const DenseTensor& t, const Index& s, const Index& l,
                           const Index& r, const Index& k) {
  return t.permuted({s, l, r, k});
}

DenseTensor make_site(const Index& s, const Index& l, const Index& r, const Index& k,
                      std::vector<cplx> data) {
  return DenseTensor({s, l, r, k}, std::move(data));
}

namespace {

std::vector<Index> make_bonds(const std::vector<std::int64_t>& inner_dims) {
  std::vector<Index> bonds;
  bonds.push_back(Index::make(1, IndexRole::bond));
  for (auto d : inner_dims) bonds.push_back(Index::make(d, IndexRole::bond));
  bonds.push_back(Index::make(1, IndexRole::bond));
  return bonds;
}

// Site i becomes left-isometric over (s, l, k); the remainder moves into i+1.
void left_orthogonalize(std::vector<DenseTensor>& sites, std::size_t i) {
  const auto& a = sites[i];
  const Index s = a.index(0), l = a.index(1), r = a.index(2), k = a.index(3);
  const Matricization m = matricize(a, {s, l, k});
  const QrFactors qr = thin_qr(m.matrix);
  const Index bond = Index::make(qr.q.cols(), IndexRole::bond);
  sites[i] = unmatricize(qr.q, std::vector<Index>{s, l, k}, std::vector<Index>{bond})
                 .permuted({s, l, bond, k});
  const DenseTensor rt = unmatricize(qr.r, std::vector<Index>{bond}, std::vector<Index>{r});
  const auto& next = sites[i + 1];
  const Index s2 = next.index(0), r2 = next.index(2), k2 = next.index(3);
  sites[i + 1] = contract(rt, next).permuted({s2, bond, r2, k2});
}

// Site i becomes right-isometric over (s, r, k); the remainder moves into i-1.
void right_orthogonalize(std::vector<DenseTensor>& sites, std::size_t i) {
  const auto& a = sites[i];
  const Index s = a.index(0), l = a.index(1), r = a.index(2), k = a.index(3);
  const Matricization m = matricize(a, {l});
  const QrFactors qr = thin_qr(m.matrix.adjoint());
  const Index bond = Index::make(qr.q.cols(), IndexRole::bond);
  sites[i] = unmatricize(Matrix(qr.q.adjoint()), std::vector<Index>{bond}, m.cols)
                 .permuted({s, bond, r, k});
  const DenseTensor lt =
      unmatricize(Matrix(qr.r.adjoint()), std::vector<Index>{l}, std::vector<Index>{bond});
  const auto& prev = sites[i - 1];
  const Index s0 = prev.index(0), l0 = prev.index(1), k0 = prev.index(3);
  sites[i - 1] = contract(prev, lt).permuted({s0, l0, bond, k0});
}

std::int64_t saturating_pow2(std::size_t e, std::int64_t cap) {
  std::int64_t v = 1;
  for (std::size_t j = 0; j < e && v < cap; ++j) v *= 2;
  return std::min(v, cap);
}

}  // namespace

LpdoChain build_optimal_lpmm(std::size_t n_sites) {
  if (n_sites == 0) throw PreconditionError("build_optimal_lpmm: N must be >= 1");
  const auto bonds = make_bonds(std::vector<std::int64_t>(n_sites - 1, 1));
  const double amp = 1.0 / std::sqrt(2.0);
  std::vector<DenseTensor> sites;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const Index s = Index::make(2, IndexRole::physical);
    const Index k = Index::make(2, IndexRole::kraus);
    // data index: s + 2 * k (bond dims are 1)
    sites.push_back(make_site(s, bonds[i], bonds[i + 1], k, {amp, 0.0, 0.0, amp}));
  }
  return LpdoChain(std::move(sites), 0);
}

LpdoChain build_random_pure(std::size_t n_sites, std::int64_t chi_max, std::uint64_t seed) {
  if (n_sites == 0) throw PreconditionError("build_random_pure: N must be >= 1");
  if (chi_max < 1) throw PreconditionError("build_random_pure: chi_max must be >= 1");
  std::vector<std::int64_t> dims;
  for (std::size_t b = 0; b + 1 < n_sites; ++b)
    dims.push_back(std::min({chi_max, saturating_pow2(b + 1, chi_max),
                             saturating_pow2(n_sites - 1 - b, chi_max)}));
  const auto bonds = make_bonds(dims);

  std::mt19937_64 rng(seed);
  std::vector<DenseTensor> sites;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const Index s = Index::make(2, IndexRole::physical);
    const Index k = Index::make(1, IndexRole::kraus);
    const Matrix g = random_gaussian(2 * bonds[i].dim * bonds[i + 1].dim, 1, rng);
    sites.push_back(make_site(s, bonds[i], bonds[i + 1], k,
                              std::vector<cplx>(g.data(), g.data() + g.size())));
  }
  for (std::size_t i = 0; i + 1 < n_sites; ++i) left_orthogonalize(sites, i);
  auto& last = sites.back();
  last = last.scaled(1.0 / last.norm());
  return LpdoChain(std::move(sites), n_sites - 1);
}

LpdoChain build_product_pure(const std::vector<Vector>& states) {
  if (states.empty()) throw PreconditionError("build_product_pure: no sites");
  const auto bonds = make_bonds(std::vector<std::int64_t>(states.size() - 1, 1));
  std::vector<DenseTensor> sites;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != 2) throw DimensionError("product state entries must be 2-vectors");
    const Vector v = states[i].normalized();
    sites.push_back(make_site(Index::make(2, IndexRole::physical), bonds[i], bonds[i + 1],
                              Index::make(1, IndexRole::kraus), {v(0), v(1)}));
  }
  return LpdoChain(std::move(sites), 0);
}

LpdoChain canonicalize(const LpdoChain& chain, std::size_t center) {
  if (center >= chain.size()) throw PreconditionError("canonicalize: center out of range");
  auto sites = chain.sites();
  for (std::size_t i = 0; i < center; ++i) left_orthogonalize(sites, i);
  for (std::size_t i = sites.size() - 1; i > center; --i) right_orthogonalize(sites, i);
  return LpdoChain(std::move(sites), center, chain.local_dim());
}

LpdoChain move_center(const LpdoChain& chain, std::size_t center) {
  if (center >= chain.size()) throw PreconditionError("move_center: center out of range");
  if (!chain.center()) return canonicalize(chain, center);
  const std::size_t from = *chain.center();
  if (from == center) return chain;
  auto sites = chain.sites();
  if (from < center) {
    for (std::size_t i = from; i < center; ++i) left_orthogonalize(sites, i);
  } else {
    for (std::size_t i = from; i > center; --i) right_orthogonalize(sites, i);
  }
  return LpdoChain(std::move(sites), center, chain.local_dim());
}

DenseTensor two_site_block(const LpdoChain& chain, std::size_t bond) {
  if (bond + 1 >= chain.size()) throw PreconditionError("two_site_block: bond out of range");
  if (!chain.center() || (*chain.center() != bond && *chain.center() != bond + 1))
    throw PreconditionError("two_site_block: orthogonality center must be at bond " +
                            std::to_string(bond) + " or its right neighbor");
  const auto& a = chain.site(bond);
  const auto& b = chain.site(bond + 1);
  return contract(a, b).permuted({chain.physical(bond), chain.physical(bond + 1),
                                  chain.left(bond), chain.right(bond + 1),
                                  chain.kraus(bond), chain.kraus(bond + 1)});
}

SplitReport split_block(const LpdoChain& chain, std::size_t bond, const DenseTensor& block,
                        const TruncationPolicy& policy, Absorb absorb) {
  if (bond + 1 >= chain.size()) throw PreconditionError("split_block: bond out of range");
  if (block.rank() != 6) throw DimensionError("split_block: block must have rank 6");
  const Index s1 = block.index(0), s2 = block.index(1), l = block.index(2),
              r = block.index(3), k1 = block.index(4), k2 = block.index(5);
  if (!(s1 == chain.physical(bond)) || !(s2 == chain.physical(bond + 1)) ||
      !(l == chain.left(bond)) || !(r == chain.right(bond + 1)))
    throw DimensionError("split_block: block legs do not match the chain");

  const SvdOutcome svd = svd_truncate(block, {s1, l, k1}, policy);
  const std::int64_t kept = svd.kept_rank;
  DenseTensor left = svd.left;    // (s1, l, k1, bond)
  DenseTensor right = svd.right;  // (bond, s2, r, k2)
  if (absorb == Absorb::right) {
    auto data = right.data();
    const std::size_t stride = static_cast<std::size_t>(kept);
    for (std::size_t j = 0; j < data.size(); ++j) data[j] *= svd.spectrum[j % stride];
  } else {
    auto data = left.data();
    const std::size_t block_len = data.size() / static_cast<std::size_t>(kept);
    for (std::size_t j = 0; j < data.size(); ++j) data[j] *= svd.spectrum[j / block_len];
  }
  SplitReport out{chain, svd.spectrum, svd.discarded_weight};
  out.chain.set_pair(bond, left.permuted({s1, l, svd.bond, k1}),
                     right.permuted({s2, svd.bond, r, k2}));
  out.chain.set_center(absorb == Absorb::right ? bond + 1 : bond);
  return out;
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

DenseTensor operator_tensor(const Matrix& m, const std::vector<Index>& out,
                            const std::vector<Index>& in) {
  // Column-major fusion makes the first listed leg fastest, so reverse the
  // most-significant-first lists.
  const std::vector<Index> rows(out.rbegin(), out.rend());
  const std::vector<Index> cols(in.rbegin(), in.rend());
  std::vector<Index> order = out;
  order.insert(order.end(), in.begin(), in.end());
  return unmatricize(m, rows, cols).permuted(order);
}

LpdoChain apply_unitary(const LpdoChain& chain, std::size_t site, const Matrix& u) {
  if (site >= chain.size()) throw PreconditionError("apply_unitary: site out of range");
  if (u.rows() != chain.local_dim() || !is_unitary(u))
    throw PreconditionError("apply_unitary: operator is not a 2x2 unitary");
  const auto& a = chain.site(site);
  const Index s = chain.physical(site);
  const Index s_out = s.fresh();
  const DenseTensor ut = operator_tensor(u, {s_out}, {s});
  DenseTensor updated = contract(ut, a).relabeled(s_out.id, s);
  LpdoChain out = chain;
  out.set_site(site, updated.permuted({s, chain.left(site), chain.right(site),
                                       chain.kraus(site)}));
  return out;
}

LpdoChain apply_unitary(const LpdoChain& chain, std::size_t a, std::size_t b,
                        const Matrix& u, const TruncationPolicy& policy) {
  if (a >= chain.size() || b >= chain.size())
    throw PreconditionError("apply_unitary: site out of range");
  if (a + 1 != b && b + 1 != a)
    throw PreconditionError("apply_unitary: sites " + std::to_string(a) + " and " +
                            std::to_string(b) + " are not adjacent");
  if (u.rows() != 4 || !is_unitary(u))
    throw PreconditionError("apply_unitary: operator is not a 4x4 unitary");
  const std::size_t first = std::min(a, b);
  const LpdoChain centered = move_center(chain, first);
  const DenseTensor block = two_site_block(centered, first);
  const Index sa = centered.physical(a), sb = centered.physical(b);
  const Index sa_out = sa.fresh(), sb_out = sb.fresh();
  const DenseTensor ut = operator_tensor(u, {sa_out, sb_out}, {sa, sb});
  DenseTensor updated =
      contract(ut, block).relabeled(sa_out.id, sa).relabeled(sb_out.id, sb);
  updated = updated.permuted({block.index(0), block.index(1), block.index(2),
                              block.index(3), block.index(4), block.index(5)});
  TruncationPolicy p = policy;
  p.norm_mode = NormMode::L2;
  p.unit_norm = true;
  return split_block(centered, first, updated, p).chain;
}

}  // namespace lpdo
