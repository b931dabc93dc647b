#include "lpdo/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace lpdo {

std::string to_string(IndexRole role) {
  switch (role) {
    case IndexRole::physical: return "physical";
    case IndexRole::bond: return "bond";
    case IndexRole::kraus: return "kraus";
    case IndexRole::other: return "other";
  }
  return "other";
}

Index Index::make(std::int64_t dim, IndexRole role) {
  static std::atomic<std::uint64_t> next_id{1};
  if (dim < 1) throw DimensionError("index dimension must be >= 1");
  return Index{next_id.fetch_add(1, std::memory_order_relaxed), dim, role};
}

namespace {

std::size_t grid_size(const std::vector<Index>& indices) {
  std::size_t n = 1;
  for (const auto& ix : indices) n *= static_cast<std::size_t>(ix.dim);
  return n;
}

void check_indices(const std::vector<Index>& indices) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& ix : indices) {
    if (ix.dim < 1) throw DimensionError("index dimension must be >= 1");
    if (!seen.insert(ix.id).second)
      throw DimensionError("duplicate index id " + std::to_string(ix.id) +
                           " within one tensor");
  }
}

std::vector<std::size_t> strides_of(const std::vector<Index>& indices) {
  std::vector<std::size_t> strides(indices.size());
  std::size_t s = 1;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    strides[k] = s;
    s *= static_cast<std::size_t>(indices[k].dim);
  }
  return strides;
}

}  // namespace

DenseTensor::DenseTensor() : data_(1, cplx(0.0)) {}

DenseTensor::DenseTensor(std::vector<Index> indices)
    : indices_(std::move(indices)) {
  check_indices(indices_);
  data_.assign(grid_size(indices_), cplx(0.0));
}

DenseTensor::DenseTensor(std::vector<Index> indices, std::vector<cplx> data)
    : indices_(std::move(indices)), data_(std::move(data)) {
  check_indices(indices_);
  if (data_.size() != grid_size(indices_))
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match index grid " +
                         std::to_string(grid_size(indices_)));
}

DenseTensor DenseTensor::scalar(cplx value) {
  DenseTensor t;
  t.data_[0] = value;
  return t;
}

std::optional<std::size_t> DenseTensor::position(std::uint64_t id) const {
  for (std::size_t k = 0; k < indices_.size(); ++k)
    if (indices_[k].id == id) return k;
  return std::nullopt;
}

const Index& DenseTensor::find(std::uint64_t id) const {
  auto pos = position(id);
  if (!pos) throw DimensionError("index id " + std::to_string(id) + " not found");
  return indices_[*pos];
}

cplx& DenseTensor::at(std::span<const std::int64_t> coords) {
  if (coords.size() != indices_.size())
    throw DimensionError("coordinate count does not match tensor rank");
  std::size_t offset = 0, stride = 1;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (coords[k] < 0 || coords[k] >= indices_[k].dim)
      throw DimensionError("coordinate out of range");
    offset += static_cast<std::size_t>(coords[k]) * stride;
    stride *= static_cast<std::size_t>(indices_[k].dim);
  }
  return data_[offset];
}

cplx DenseTensor::at(std::span<const std::int64_t> coords) const {
  return const_cast<DenseTensor*>(this)->at(coords);
}

DenseTensor DenseTensor::permuted(std::span<const Index> order) const {
  if (order.size() != indices_.size())
    throw DimensionError("permutation must list every index exactly once");
  std::vector<std::size_t> src_pos(order.size());
  std::vector<Index> dst_indices(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto pos = position(order[k].id);
    if (!pos) throw DimensionError("permutation names unknown index id " +
                                   std::to_string(order[k].id));
    src_pos[k] = *pos;
    dst_indices[k] = indices_[*pos];
  }
  bool identity = true;
  for (std::size_t k = 0; k < src_pos.size(); ++k) identity &= src_pos[k] == k;
  if (identity) return *this;

  const auto src_strides = strides_of(indices_);
  std::vector<std::size_t> step(order.size());
  std::vector<std::int64_t> dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    step[k] = src_strides[src_pos[k]];
    dims[k] = dst_indices[k].dim;
  }
  std::vector<cplx> out(data_.size());
  std::vector<std::int64_t> counter(order.size(), 0);
  std::size_t src = 0;
  const std::size_t rank = order.size();
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out[dst] = data_[src];
    for (std::size_t k = 0; k < rank; ++k) {
      if (++counter[k] < dims[k]) {
        src += step[k];
        break;
      }
      counter[k] = 0;
      src -= step[k] * static_cast<std::size_t>(dims[k] - 1);
    }
  }
  return DenseTensor(std::move(dst_indices), std::move(out));
}

DenseTensor DenseTensor::relabeled(std::uint64_t old_id,
                                   const Index& replacement) const {
  auto pos = position(old_id);
  if (!pos) throw DimensionError("relabel: unknown index id " + std::to_string(old_id));
  if (indices_[*pos].dim != replacement.dim)
    throw DimensionError("relabel: replacement dimension differs");
  auto indices = indices_;
  indices[*pos] = replacement;
  return DenseTensor(std::move(indices), data_);
}

DenseTensor DenseTensor::conj() const {
  auto out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

DenseTensor DenseTensor::scaled(cplx factor) const {
  auto out = *this;
  for (auto& v : out.data_) v *= factor;
  return out;
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

cplx DenseTensor::scalar_value() const {
  if (!indices_.empty()) throw DimensionError("scalar_value on a tensor of rank > 0");
  return data_[0];
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b) {
  std::vector<Index> free_a, shared, free_b;
  for (const auto& ix : a.indices()) {
    if (auto pos = b.position(ix.id)) {
      if (b.index(*pos).dim != ix.dim)
        throw DimensionError("contract: shared index id " + std::to_string(ix.id) +
                             " has dims " + std::to_string(ix.dim) + " and " +
                             std::to_string(b.index(*pos).dim));
      shared.push_back(ix);
    } else {
      free_a.push_back(ix);
    }
  }
  for (const auto& ix : b.indices())
    if (!a.has_index(ix.id)) free_b.push_back(ix);

  std::vector<Index> order_a = free_a;
  order_a.insert(order_a.end(), shared.begin(), shared.end());
  std::vector<Index> order_b = shared;
  order_b.insert(order_b.end(), free_b.begin(), free_b.end());

  const DenseTensor pa = a.permuted(order_a);
  const DenseTensor pb = b.permuted(order_b);

  std::int64_t m = 1, k = 1, n = 1;
  for (const auto& ix : free_a) m *= ix.dim;
  for (const auto& ix : shared) k *= ix.dim;
  for (const auto& ix : free_b) n *= ix.dim;

  Eigen::Map<const Matrix> ma(pa.data().data(), m, k);
  Eigen::Map<const Matrix> mb(pb.data().data(), k, n);

  std::vector<Index> out_indices = free_a;
  out_indices.insert(out_indices.end(), free_b.begin(), free_b.end());
  std::vector<cplx> out(static_cast<std::size_t>(m * n));
  Eigen::Map<Matrix> mc(out.data(), m, n);
  mc.noalias() = ma * mb;
  return DenseTensor(std::move(out_indices), std::move(out));
}

Matricization matricize(const DenseTensor& t, std::span<const Index> rows) {
  Matricization out;
  for (const auto& r : rows) out.rows.push_back(t.find(r.id));
  for (const auto& ix : t.indices()) {
    bool is_row = std::any_of(rows.begin(), rows.end(),
                              [&](const Index& r) { return r.id == ix.id; });
    if (!is_row) out.cols.push_back(ix);
  }
  std::vector<Index> order = out.rows;
  order.insert(order.end(), out.cols.begin(), out.cols.end());
  const DenseTensor p = t.permuted(order);
  std::int64_t nr = 1, nc = 1;
  for (const auto& ix : out.rows) nr *= ix.dim;
  for (const auto& ix : out.cols) nc *= ix.dim;
  out.matrix = Eigen::Map<const Matrix>(p.data().data(), nr, nc);
  return out;
}

Matricization matricize(const DenseTensor& t, std::initializer_list<Index> rows) {
  return matricize(t, std::span<const Index>(rows.begin(), rows.size()));
}

DenseTensor unmatricize(const Matrix& m, std::span<const Index> rows,
                        std::span<const Index> cols) {
  std::int64_t nr = 1, nc = 1;
  for (const auto& ix : rows) nr *= ix.dim;
  for (const auto& ix : cols) nc *= ix.dim;
  if (m.rows() != nr || m.cols() != nc)
    throw DimensionError("unmatricize: matrix shape does not match indices");
  std::vector<Index> indices(rows.begin(), rows.end());
  indices.insert(indices.end(), cols.begin(), cols.end());
  std::vector<cplx> data(m.data(), m.data() + m.size());
  return DenseTensor(std::move(indices), std::move(data));
}

DenseTensor unmatricize(const Matricization& m) {
  return unmatricize(m.matrix, m.rows, m.cols);
}

void TruncationPolicy::validate() const {
  if (!(cutoff >= 0.0 && cutoff < 1.0))
    throw PreconditionError("truncation cutoff must lie in [0, 1)");
  if (max_rank && *max_rank < 1)
    throw PreconditionError("truncation max_rank must be >= 1");
  if (zero_floor < 0.0) throw PreconditionError("zero_floor must be >= 0");
}

SpectrumCut cut_spectrum(std::span<const double> values,
                         const TruncationPolicy& policy) {
  policy.validate();
  if (values.empty()) throw PreconditionError("cannot truncate an empty spectrum");
  SpectrumCut cut;
  const bool l2 = policy.norm_mode == NormMode::L2;
  double total = 0.0;
  for (double v : values) total += l2 ? v * v : v;
  cut.norm = l2 ? std::sqrt(total) : total;
  if (!(cut.norm > 0.0)) throw PreconditionError("cannot truncate a zero spectrum");

  std::int64_t kept = 0;
  for (double v : values) {
    if (v <= policy.zero_floor) break;
    if (policy.cutoff_mode == CutoffMode::relative_value && v / cut.norm < policy.cutoff) break;
    ++kept;
  }
  if (policy.cutoff_mode == CutoffMode::truncated_weight) {
    double acc = 0.0;
    while (kept > 1) {
      const double v = values[static_cast<std::size_t>(kept - 1)];
      const double w = (l2 ? v * v : v) / total;
      if (acc + w >= policy.cutoff) break;
      acc += w;
      --kept;
    }
  }
  if (policy.max_rank) kept = std::min(kept, *policy.max_rank);
  kept = std::max<std::int64_t>(kept, 1);
  cut.kept = kept;

  double kept_sum = 0.0, lost = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double w = l2 ? values[j] * values[j] : values[j];
    (static_cast<std::int64_t>(j) < kept ? kept_sum : lost) += w;
  }
  if (l2) {
    cut.discarded = std::sqrt(lost);
    // sqrt(N^2 - delta^2) is the norm of the kept part.
    const double kept_norm = std::sqrt(kept_sum);
    cut.rescale = (policy.unit_norm ? 1.0 : cut.norm) / kept_norm;
  } else {
    cut.discarded = lost;
    cut.rescale = (policy.unit_norm ? 1.0 : cut.norm) / kept_sum;
  }
  return cut;
}

SvdOutcome svd_truncate(const DenseTensor& t, std::span<const Index> rows,
                        const TruncationPolicy& policy, IndexRole bond_role) {
  const Matricization mat = matricize(t, rows);
  Eigen::BDCSVD<Matrix> svd(mat.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> values(sv.data(), sv.data() + sv.size());
  const SpectrumCut cut = cut_spectrum(values, policy);

  SvdOutcome out;
  out.kept_rank = cut.kept;
  out.norm = cut.norm;
  out.discarded_weight = cut.discarded;
  out.spectrum.resize(static_cast<std::size_t>(cut.kept));
  for (std::int64_t j = 0; j < cut.kept; ++j)
    out.spectrum[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(j)] * cut.rescale;
  out.bond = Index::make(cut.kept, bond_role);

  const std::vector<Index> bond{out.bond};
  out.left = unmatricize(Matrix(svd.matrixU().leftCols(cut.kept)), mat.rows, bond);
  out.right = unmatricize(Matrix(svd.matrixV().leftCols(cut.kept).adjoint()), bond,
                          mat.cols);
  return out;
}

SvdOutcome svd_truncate(const DenseTensor& t, std::initializer_list<Index> rows,
                        const TruncationPolicy& policy, IndexRole bond_role) {
  return svd_truncate(t, std::span<const Index>(rows.begin(), rows.size()), policy,
                      bond_role);
}

QrFactors thin_qr(const Matrix& m) {
  const std::int64_t k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  QrFactors out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // Fix the phase freedom: diag(R) real and nonnegative.
  for (std::int64_t j = 0; j < k; ++j) {
    const cplx d = out.r(j, j);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const cplx phase = d / mag;
    out.q.col(j) *= phase;
    out.r.row(j) *= std::conj(phase);
    out.r(j, j) = mag;
  }
  return out;
}

Matrix qr_isometrize(const Matrix& m) {
  if (m.rows() < m.cols())
    throw DimensionError("qr_isometrize requires rows >= cols");
  return thin_qr(m).q;
}

double isometry_error(const Matrix& m) {
  return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

}  // namespace lpdo
