#include "lpdo/channel.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace lpdo {

double KrausChannel::completeness_error() const {
  if (operators.empty()) return std::numeric_limits<double>::infinity();
  const auto d = operators.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : operators) {
    if (k.rows() != d || k.cols() != d) return std::numeric_limits<double>::infinity();
    sum += k.adjoint() * k;
  }
  return (sum - Matrix::Identity(d, d)).norm();
}

void KrausChannel::validate(double tol) const {
  const double err = completeness_error();
  if (!(err <= tol))
    throw PreconditionError("channel '" + label + "' is not trace preserving (error " +
                            std::to_string(err) + ")");
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

namespace {

void check_rate(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw PreconditionError("channel rate must lie in [0, 1]");
}

}  // namespace

KrausChannel bitflip(double gamma) {
  check_rate(gamma);
  return {{std::sqrt(gamma) * pauli_x(), std::sqrt(1.0 - gamma) * Matrix::Identity(2, 2)},
          "bitflip"};
}

KrausChannel dephasing(double gamma) {
  check_rate(gamma);
  return {{std::sqrt(gamma) * pauli_z(), std::sqrt(1.0 - gamma) * Matrix::Identity(2, 2)},
          "dephasing"};
}

KrausChannel amplitude_damping(double gamma) {
  check_rate(gamma);
  Matrix k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return {{k0, k1}, "amplitude_damping"};
}

TruncationPolicy default_kraus_policy() { return TruncationPolicy::l1(1e-12); }

LpdoChain apply_channel(const LpdoChain& chain, std::size_t site,
                        const KrausChannel& channel, const TruncationPolicy& policy) {
  if (site >= chain.size()) throw PreconditionError("apply_channel: site out of range");
  if (policy.norm_mode != NormMode::L1)
    throw PreconditionError("apply_channel: kraus-space truncation must use L1 mode");
  channel.validate();
  if (channel.operators.front().rows() != chain.local_dim())
    throw DimensionError("apply_channel: operator size differs from local dimension");

  const LpdoChain centered = move_center(chain, site);
  const auto& a = centered.site(site);
  const Index s = centered.physical(site), l = centered.left(site),
              r = centered.right(site);
  // Rows (s, l, r) with s fastest, columns kappa.
  const Matrix m = matricize(a, {s, l, r}).matrix;
  const std::int64_t d = centered.local_dim();
  const std::int64_t rest = m.rows() / d;
  const std::int64_t kappa = m.cols();
  const auto n_ops = static_cast<std::int64_t>(channel.operators.size());

  // Composite = W W^dagger with W = [K_0 A | K_1 A | ...]; its nonzero
  // spectrum is that of the small Gram matrix W^dagger W.
  Matrix w(m.rows(), kappa * n_ops);
  for (std::int64_t j = 0; j < n_ops; ++j) {
    Matrix block = m;
    Eigen::Map<const Matrix> src(m.data(), d, rest * kappa);
    Eigen::Map<Matrix> dst(block.data(), d, rest * kappa);
    dst = channel.operators[static_cast<std::size_t>(j)] * src;
    w.middleCols(j * kappa, kappa) = block;
  }
  const Matrix gram = w.adjoint() * w;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const auto n = gram.rows();
  std::vector<double> probs(static_cast<std::size_t>(n));
  Matrix vecs(n, n);
  for (std::int64_t j = 0; j < n; ++j) {
    probs[static_cast<std::size_t>(j)] = std::max(0.0, eig.eigenvalues()(n - 1 - j));
    vecs.col(j) = eig.eigenvectors().col(n - 1 - j);
  }
  const SpectrumCut cut = cut_spectrum(probs, policy);
  const Matrix updated = w * vecs.leftCols(cut.kept) * std::sqrt(cut.rescale);

  const Index k_new = Index::make(cut.kept, IndexRole::kraus);
  LpdoChain out = centered;
  out.set_site(site, unmatricize(updated, std::vector<Index>{s, l, r},
                                 std::vector<Index>{k_new}));
  return out;
}

LpdoChain depolarize_to_lpmm(const LpdoChain& chain, double gamma_d, double gamma_b,
                             const TruncationPolicy& policy) {
  const KrausChannel flip = bitflip(gamma_b);
  const KrausChannel phase = dephasing(gamma_d);
  LpdoChain out = chain;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out = apply_channel(out, i, flip, policy);
    out = apply_channel(out, i, phase, policy);
  }
  return out;
}

}  // namespace lpdo
