#include "lpdo/dense_oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace lpdo::oracle {

double DenseRho::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(matrix, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

DenseRho maximally_mixed(std::size_t n_qubits) {
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  return {n_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim)};
}

DenseRho lpdo_to_dense(const LpdoChain& chain, std::size_t max_qubits) {
  const std::size_t n = chain.size();
  if (n > std::min(max_qubits, kMaxQubits))
    throw ResourceError("lpdo_to_dense: " + std::to_string(n) + " qubits exceeds the cap");
  // acc[(row, col)][a, a'] with rows/cols the accumulated physical indices
  // and (a, a') the open bonds of the ket and bra layers.
  std::int64_t dim = 1;
  std::int64_t chi = 1;
  std::vector<cplx> acc(1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = chain.site(i);
    const std::int64_t d = t.index(0).dim, cl = t.index(1).dim, cr = t.index(2).dim,
                       kd = t.index(3).dim;
    if (cl != chi) throw DimensionError("lpdo_to_dense: bond mismatch");
    const auto data = t.data();
    auto at = [&](std::int64_t s, std::int64_t l, std::int64_t r, std::int64_t k) {
      return data[static_cast<std::size_t>(s + d * (l + cl * (r + cr * k)))];
    };
    const std::int64_t ndim = dim * d;
    std::vector<cplx> next(static_cast<std::size_t>(ndim * ndim * cr * cr), 0.0);
    auto acc_at = [&](std::int64_t row, std::int64_t col, std::int64_t a, std::int64_t b) {
      return acc[static_cast<std::size_t>(((row * dim + col) * chi + a) * chi + b)];
    };
    for (std::int64_t row = 0; row < dim; ++row)
      for (std::int64_t col = 0; col < dim; ++col)
        for (std::int64_t a = 0; a < chi; ++a)
          for (std::int64_t b = 0; b < chi; ++b) {
            const cplx e = acc_at(row, col, a, b);
            if (e == cplx(0.0)) continue;
            for (std::int64_t s = 0; s < d; ++s)
              for (std::int64_t sp = 0; sp < d; ++sp)
                for (std::int64_t r = 0; r < cr; ++r)
                  for (std::int64_t rp = 0; rp < cr; ++rp) {
                    cplx sum = 0.0;
                    for (std::int64_t k = 0; k < kd; ++k)
                      sum += at(s, a, r, k) * std::conj(at(sp, b, rp, k));
                    const std::int64_t nrow = row * d + s, ncol = col * d + sp;
                    next[static_cast<std::size_t>(((nrow * ndim + ncol) * cr + r) * cr + rp)] +=
                        e * sum;
                  }
          }
    acc = std::move(next);
    dim = ndim;
    chi = cr;
  }
  DenseRho out{n, Matrix(dim, dim)};
  for (std::int64_t row = 0; row < dim; ++row)
    for (std::int64_t col = 0; col < dim; ++col)
      out.matrix(row, col) = acc[static_cast<std::size_t>(row * dim + col)];
  return out;
}

Matrix embed(const Matrix& op, std::size_t first, std::size_t n_qubits) {
  std::size_t k = 0;
  while ((std::int64_t{1} << k) < op.rows()) ++k;
  if ((std::int64_t{1} << k) != op.rows() || op.rows() != op.cols())
    throw DimensionError("embed: operator must be square with power-of-two size");
  if (first + k > n_qubits) throw DimensionError("embed: operator exceeds the register");
  const std::int64_t left = std::int64_t{1} << first;
  const std::int64_t right = std::int64_t{1} << (n_qubits - first - k);
  Matrix out = Matrix::Zero(left * op.rows() * right, left * op.rows() * right);
  // index = (l * dim_op + o) * right + r
  for (std::int64_t l = 0; l < left; ++l)
    for (std::int64_t r = 0; r < right; ++r)
      for (std::int64_t i = 0; i < op.rows(); ++i)
        for (std::int64_t j = 0; j < op.cols(); ++j)
          out((l * op.rows() + i) * right + r, (l * op.rows() + j) * right + r) = op(i, j);
  return out;
}

DenseRho dense_apply(const DenseRho& rho, const Matrix& u, const std::vector<std::size_t>& sites) {
  if (sites.empty()) throw PreconditionError("dense_apply: no sites");
  for (std::size_t j = 1; j < sites.size(); ++j)
    if (sites[j] != sites[j - 1] + 1)
      throw PreconditionError("dense_apply: sites must be consecutive and ascending");
  if (u.rows() != (std::int64_t{1} << sites.size()) ||
      (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() > 1e-10)
    throw PreconditionError("dense_apply: operator is not a unitary of matching size");
  const Matrix full = embed(u, sites.front(), rho.n_qubits);
  return {rho.n_qubits, full * rho.matrix * full.adjoint()};
}

DenseRho dense_apply(const DenseRho& rho, const KrausChannel& channel, std::size_t site) {
  channel.validate(1e-10);
  DenseRho out{rho.n_qubits, Matrix::Zero(rho.matrix.rows(), rho.matrix.cols())};
  for (const auto& k : channel.operators) {
    const Matrix full = embed(k, site, rho.n_qubits);
    out.matrix += full * rho.matrix * full.adjoint();
  }
  return out;
}

DenseMeasures dense_measures(const DenseRho& a, const DenseRho& b) {
  if (a.matrix.rows() != b.matrix.rows())
    throw DimensionError("dense_measures: size mismatch");
  DenseMeasures m;
  m.trace_a = a.trace();
  m.trace_b = b.trace();
  m.purity_a = (a.matrix * a.matrix).trace().real();
  m.purity_b = (b.matrix * b.matrix).trace().real();
  m.overlap = (a.matrix * b.matrix).trace().real();
  m.fidelity = m.overlap / std::max(m.purity_a, m.purity_b);
  return m;
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (std::int64_t j = 0; j < eig.eigenvalues().size(); ++j) {
    const double p = eig.eigenvalues()(j);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

double bipartite_entropy(const Vector& psi, std::int64_t left_dim) {
  if (left_dim < 1 || psi.size() % left_dim != 0)
    throw DimensionError("bipartite_entropy: left dimension does not divide the state");
  const std::int64_t right_dim = psi.size() / left_dim;
  // psi index = l * right_dim + r; as a row-major left x right matrix.
  Matrix m(left_dim, right_dim);
  for (std::int64_t l = 0; l < left_dim; ++l)
    for (std::int64_t r = 0; r < right_dim; ++r) m(l, r) = psi(l * right_dim + r);
  const Matrix rho = m * m.adjoint() / psi.squaredNorm();
  return von_neumann_entropy(rho);
}

}  // namespace lpdo::oracle
