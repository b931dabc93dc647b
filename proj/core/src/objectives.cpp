#include "lpdo/objectives.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace lpdo {

namespace {

double entropy_from_gram_eigs(const Eigen::VectorXd& eigs, double total) {
  double s = 0.0;
  for (std::int64_t j = 0; j < eigs.size(); ++j) {
    const double p = std::max(eigs(j), 0.0) / total;
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

void require_isometry(const Matrix& v, std::int64_t kc) {
  if (v.rows() != kc || v.cols() != kc)
    throw DimensionError("objective: V must be " + std::to_string(kc) + "x" +
                         std::to_string(kc));
  if (isometry_error(v) > 1e-10) throw PreconditionError("objective: V is not an isometry");
}

}  // namespace

BlockObjective::BlockObjective(const DenseTensor& block, ObjectiveKind kind) : kind_(kind) {
  if (block.rank() != 6) throw DimensionError("BlockObjective: block must have rank 6");
  d1_ = block.index(0).dim;
  d2_ = block.index(1).dim;
  l_ = block.index(2).dim;
  r_ = block.index(3).dim;
  k1_ = block.index(4).dim;
  k2_ = block.index(5).dim;
  kc_ = k1_ * k2_;
  const std::int64_t rows = d1_ * d2_ * l_ * r_;
  bm_ = Eigen::Map<const Matrix>(block.data().data(), rows, kc_);
  transposed_ = d1_ * l_ * k1_ < d2_ * r_ * k2_;
}

Matrix BlockObjective::bipartition(const Matrix& v) const {
  const Matrix bp = bm_ * v;
  Matrix m(d1_ * l_ * k1_, d2_ * r_ * k2_);
  for (std::int64_t k2 = 0; k2 < k2_; ++k2)
    for (std::int64_t k1 = 0; k1 < k1_; ++k1)
      for (std::int64_t r = 0; r < r_; ++r)
        for (std::int64_t l = 0; l < l_; ++l)
          for (std::int64_t s2 = 0; s2 < d2_; ++s2)
            for (std::int64_t s1 = 0; s1 < d1_; ++s1)
              m(s1 + d1_ * (l + l_ * k1), s2 + d2_ * (r + r_ * k2)) =
                  bp(s1 + d1_ * (s2 + d2_ * (l + l_ * r)), k1 + k1_ * k2);
  return m;
}

Matrix BlockObjective::oriented(const Matrix& v) const {
  Matrix m = bipartition(v);
  if (transposed_) return m.transpose();
  return m;
}

Matrix BlockObjective::piece(std::int64_t a) const {
  Matrix p(d1_ * l_, d2_ * r_);
  for (std::int64_t r = 0; r < r_; ++r)
    for (std::int64_t l = 0; l < l_; ++l)
      for (std::int64_t s2 = 0; s2 < d2_; ++s2)
        for (std::int64_t s1 = 0; s1 < d1_; ++s1)
          p(s1 + d1_ * l, s2 + d2_ * r) = bm_(s1 + d1_ * (s2 + d2_ * (l + l_ * r)), a);
  if (transposed_) return p.transpose();
  return p;
}

double BlockObjective::value(const Matrix& v) const {
  const Matrix x = oriented(v);
  const double n = x.squaredNorm();
  if (kind_ == ObjectiveKind::s_sr) {
    const Matrix g = x.adjoint() * x;
    return -std::log(g.squaredNorm() / (n * n));
  }
  Eigen::BDCSVD<Matrix> svd(x);
  const Eigen::VectorXd sv = svd.singularValues();
  return entropy_from_gram_eigs(sv.array().square().matrix(), n);
}

Matrix BlockObjective::analytic_gradient(const Matrix& v) const {
  if (v.rows() != kc_ || v.cols() != kc_) throw DimensionError("gradient: V shape mismatch");
  const Matrix x = oriented(v);
  const double n = x.squaredNorm();
  Matrix gx;
  if (kind_ == ObjectiveKind::s_sr) {
    const Matrix g = x.adjoint() * x;
    gx = (-4.0 / g.squaredNorm()) * (x * g) + (4.0 / n) * x;
  } else {
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double s = entropy_from_gram_eigs(sv.array().square().matrix(), n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sv.size());
    for (std::int64_t j = 0; j < sv.size(); ++j) {
      const double p = sv(j) * sv(j) / n;
      if (p > 0.0) w(j) = sv(j) * (std::log(p) + s);
    }
    gx = (-2.0 / n) * svd.matrixU() * w.asDiagonal() * svd.matrixV().adjoint();
  }
  const Matrix gm = transposed_ ? Matrix(gx.transpose()) : gx;
  // Back to the (s_i s_{i+1} chi_l chi_r) x kc layout of bm_ V.
  Matrix gb(bm_.rows(), kc_);
  for (std::int64_t k2 = 0; k2 < k2_; ++k2)
    for (std::int64_t k1 = 0; k1 < k1_; ++k1)
      for (std::int64_t r = 0; r < r_; ++r)
        for (std::int64_t l = 0; l < l_; ++l)
          for (std::int64_t s2 = 0; s2 < d2_; ++s2)
            for (std::int64_t s1 = 0; s1 < d1_; ++s1)
              gb(s1 + d1_ * (s2 + d2_ * (l + l_ * r)), k1 + k1_ * k2) =
                  gm(s1 + d1_ * (l + l_ * k1), s2 + d2_ * (r + r_ * k2));
  return bm_.adjoint() * gb;
}

Matrix BlockObjective::gradient(const Matrix& v, double eps) const {
  if (!(eps > 0.0)) throw PreconditionError("gradient: step must be positive");
  if (v.rows() != kc_ || v.cols() != kc_) throw DimensionError("gradient: V shape mismatch");
  // Probing V(a, b) by delta adds delta * piece(a) to one (row, col) block of
  // x, so the Gram matrix changes only in that block's row and column:
  //   G' = G + delta Y E^T + conj(delta) E Y^dagger + |delta|^2 E Ga E^T
  // with Y = x_rows^dagger piece(a), E the block column selector.
  const Matrix x = oriented(v);
  const Matrix g = x.adjoint() * x;
  const double n = x.squaredNorm();
  const double t = g.squaredNorm();
  const std::int64_t hr = transposed_ ? d2_ * r_ : d1_ * l_;
  const std::int64_t wc = transposed_ ? d1_ * l_ : d2_ * r_;
  const std::int64_t n_rb = transposed_ ? k2_ : k1_;
  const std::int64_t n_cb = transposed_ ? k1_ : k2_;
  const cplx deltas[4] = {cplx(eps, 0), cplx(-eps, 0), cplx(0, eps), cplx(0, -eps)};
  const bool vn = kind_ == ObjectiveKind::s_vn;

  // For S_vn, G' is supported on range(G) + span(E), so its spectrum is that
  // of the compression Z^dagger G' Z with Z an orthonormal basis of that sum.
  std::vector<Matrix> basis, compressed;
  if (vn) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    std::int64_t rank = 0;
    while (rank < g.rows() && eig.eigenvalues()(g.rows() - 1 - rank) > 1e-15 * top) ++rank;
    const Matrix w = eig.eigenvectors().rightCols(rank);
    for (std::int64_t cb = 0; cb < n_cb; ++cb) {
      Matrix rest = w;
      rest.middleRows(cb * wc, wc).setZero();
      Eigen::JacobiSVD<Matrix> svd(rest, Eigen::ComputeThinU);
      std::int64_t k = 0;
      while (k < svd.singularValues().size() && svd.singularValues()(k) > 1e-10) ++k;
      Matrix z = Matrix::Zero(g.rows(), wc + k);
      z.block(cb * wc, 0, wc, wc).setIdentity();
      z.rightCols(k) = svd.matrixU().leftCols(k);
      compressed.push_back(z.adjoint() * g * z);
      basis.push_back(std::move(z));
    }
  }

  Matrix grad(kc_, kc_);
  Matrix q, m;
  for (std::int64_t a = 0; a < kc_; ++a) {
    const Matrix pa = piece(a);
    const Matrix ga = pa.adjoint() * pa;
    const double pa2 = pa.squaredNorm();
    for (std::int64_t rb = 0; rb < n_rb; ++rb) {
      const Matrix y = x.middleRows(rb * hr, hr).adjoint() * pa;
      for (std::int64_t cb = 0; cb < n_cb; ++cb) {
        const std::int64_t b = transposed_ ? cb + k1_ * rb : rb + k1_ * cb;
        const auto ycb = y.middleRows(cb * wc, wc);
        const cplx inner = ycb.trace();
        Matrix k_lin, k_quad;
        double col2 = 0.0, corner2 = 0.0;
        if (vn) {
          const Matrix& z = basis[static_cast<std::size_t>(cb)];
          const Matrix c = z.middleRows(cb * wc, wc);
          k_lin = (z.adjoint() * y) * c;
          k_quad = c.adjoint() * ga * c;
        } else {
          col2 = g.middleCols(cb * wc, wc).squaredNorm();
          corner2 = g.block(cb * wc, cb * wc, wc, wc).squaredNorm();
        }
        double f[4];
        for (int p = 0; p < 4; ++p) {
          const cplx dl = deltas[p];
          const double n2 = n + 2.0 * (dl * inner).real() + std::norm(dl) * pa2;
          if (vn) {
            m = compressed[static_cast<std::size_t>(cb)] + dl * k_lin +
                std::conj(dl) * k_lin.adjoint() + std::norm(dl) * k_quad;
            Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
            f[p] = entropy_from_gram_eigs(eig.eigenvalues(), n2);
          } else {
            q = g.middleCols(cb * wc, wc) + dl * y;
            q.middleRows(cb * wc, wc) += std::conj(dl) * ycb.adjoint() + std::norm(dl) * ga;
            const double p2 = t - 2.0 * col2 + corner2 + 2.0 * q.squaredNorm() -
                              q.middleRows(cb * wc, wc).squaredNorm();
            f[p] = -std::log(p2 / (n2 * n2));
          }
          if (!std::isfinite(f[p]))
            throw NumericalError("gradient: objective not finite at coordinate (" +
                                 std::to_string(a) + ", " + std::to_string(b) + ")");
        }
        grad(a, b) = cplx((f[0] - f[1]) / (2.0 * eps), (f[2] - f[3]) / (2.0 * eps));
      }
    }
  }
  return grad;
}

ObjectiveValue objective_s_sr(const DenseTensor& block, const Matrix& v) {
  return evaluate_objective(ObjectiveKind::s_sr, block, v);
}

ObjectiveValue objective_s_vn(const DenseTensor& block, const Matrix& v) {
  return evaluate_objective(ObjectiveKind::s_vn, block, v);
}

ObjectiveValue evaluate_objective(ObjectiveKind kind, const DenseTensor& block,
                                  const Matrix& v) {
  BlockObjective obj(block, kind);
  require_isometry(v, obj.dim());
  return {kind, obj.value(v)};
}

DenseTensor apply_kraus_isometry(const DenseTensor& block, const Matrix& v) {
  if (block.rank() != 6) throw DimensionError("apply_kraus_isometry: block must have rank 6");
  const std::int64_t kc = block.index(4).dim * block.index(5).dim;
  if (v.rows() != kc || v.cols() != kc)
    throw DimensionError("apply_kraus_isometry: V must be square over the fused kraus leg");
  const std::int64_t rows = static_cast<std::int64_t>(block.size()) / kc;
  const Matrix out = Eigen::Map<const Matrix>(block.data().data(), rows, kc) * v;
  return DenseTensor(block.indices(), std::vector<cplx>(out.data(), out.data() + out.size()));
}

}  // namespace lpdo
