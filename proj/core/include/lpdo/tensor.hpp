#pragma once

// Dense complex tensors with labeled indices.
//
// Storage is column-major over the index list: the first index varies
// fastest. All external behavior is expressed through labeled indices, so
// callers should not depend on the layout except through `matricize`.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpdo/error.hpp"

namespace lpdo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class IndexRole { physical, bond, kraus, other };

std::string to_string(IndexRole role);

struct Index {
  std::uint64_t id = 0;
  std::int64_t dim = 1;
  IndexRole role = IndexRole::other;

  /// Creates an index with a process-unique id.
  static Index make(std::int64_t dim, IndexRole role = IndexRole::other);

  /// Same role and dimension, fresh id.
  Index fresh() const { return make(dim, role); }

  /// Contractible: same id and same dimension.
  friend bool operator==(const Index& a, const Index& b) {
    return a.id == b.id && a.dim == b.dim;
  }
};

class DenseTensor {
 public:
  /// Rank-0 tensor holding a single zero.
  DenseTensor();
  explicit DenseTensor(std::vector<Index> indices);
  DenseTensor(std::vector<Index> indices, std::vector<cplx> data);

  static DenseTensor scalar(cplx value);

  const std::vector<Index>& indices() const { return indices_; }
  const Index& index(std::size_t pos) const { return indices_.at(pos); }
  std::size_t rank() const { return indices_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  /// Position of the index with this id, or nullopt.
  std::optional<std::size_t> position(std::uint64_t id) const;
  bool has_index(std::uint64_t id) const { return position(id).has_value(); }
  /// Index by id; throws if absent.
  const Index& find(std::uint64_t id) const;

  /// Element access by coordinates listed in index order.
  cplx& at(std::span<const std::int64_t> coords);
  cplx at(std::span<const std::int64_t> coords) const;
  cplx& at(std::initializer_list<std::int64_t> coords) {
    return at(std::span<const std::int64_t>(coords.begin(), coords.size()));
  }
  cplx at(std::initializer_list<std::int64_t> coords) const {
    return at(std::span<const std::int64_t>(coords.begin(), coords.size()));
  }

  /// Reorders data so the indices appear in `order` (a permutation of the
  /// current index set, matched by id).
  DenseTensor permuted(std::span<const Index> order) const;
  DenseTensor permuted(std::initializer_list<Index> order) const {
    return permuted(std::span<const Index>(order.begin(), order.size()));
  }

  /// Swaps the label of one index; the replacement must have the same dim.
  DenseTensor relabeled(std::uint64_t old_id, const Index& replacement) const;

  DenseTensor conj() const;
  DenseTensor scaled(cplx factor) const;

  double norm() const;
  /// Value of a rank-0 tensor.
  cplx scalar_value() const;

 private:
  std::vector<Index> indices_;
  std::vector<cplx> data_;
};

/// Sums over all indices shared by id; the result carries the free indices
/// of `a` followed by the free indices of `b`.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b);

/// Matrix view of a tensor with the given indices as (fused) rows. Within
/// the fused row and column legs the first listed index varies fastest.
struct Matricization {
  Matrix matrix;
  std::vector<Index> rows;
  std::vector<Index> cols;
};

Matricization matricize(const DenseTensor& t, std::span<const Index> rows);
Matricization matricize(const DenseTensor& t, std::initializer_list<Index> rows);

/// Inverse of `matricize`: the tensor carries `rows` then `cols`.
DenseTensor unmatricize(const Matrix& m, std::span<const Index> rows,
                        std::span<const Index> cols);
DenseTensor unmatricize(const Matricization& m);

enum class NormMode {
  L1,  ///< spectrum values are probabilities
  L2   ///< spectrum values are amplitudes
};

enum class CutoffMode {
  /// Discard values whose normalized magnitude (v / ||v||) is below the cutoff.
  relative_value,
  /// Discard the smallest values while their accumulated normalized weight
  /// (squared in L2 mode) stays below the cutoff.
  truncated_weight
};

struct TruncationPolicy {
  /// Threshold in [0, 1); its meaning is set by `cutoff_mode`.
  double cutoff = 0.0;
  CutoffMode cutoff_mode = CutoffMode::relative_value;
  /// Unbounded when empty.
  std::optional<std::int64_t> max_rank;
  NormMode norm_mode = NormMode::L2;
  /// Kept values are rescaled to unit norm instead of the input norm.
  bool unit_norm = false;
  /// Values at or below this absolute floor are always discarded.
  double zero_floor = 0.0;

  void validate() const;

  static TruncationPolicy l2(double cutoff) {
    TruncationPolicy p;
    p.cutoff = cutoff;
    p.norm_mode = NormMode::L2;
    p.unit_norm = true;
    return p;
  }
  static TruncationPolicy l1(double cutoff) {
    TruncationPolicy p;
    p.cutoff = cutoff;
    p.norm_mode = NormMode::L1;
    p.unit_norm = true;
    p.zero_floor = 1e-14;
    return p;
  }
};

/// Decision taken on a descending spectrum.
struct SpectrumCut {
  std::int64_t kept = 0;
  /// Norm of the full spectrum in the policy's norm mode.
  double norm = 0.0;
  /// L2 mode: norm of the discarded tail; L1 mode: discarded probability.
  double discarded = 0.0;
  /// Multiplier applied to each kept value.
  double rescale = 1.0;
};

/// Applies a truncation policy to a descending nonnegative spectrum.
SpectrumCut cut_spectrum(std::span<const double> descending,
                         const TruncationPolicy& policy);

struct SvdOutcome {
  /// rows... + bond, isometric over the rows.
  DenseTensor left;
  /// Kept values after renormalization, descending.
  std::vector<double> spectrum;
  /// bond + cols..., co-isometric.
  DenseTensor right;
  Index bond;
  std::int64_t kept_rank = 0;
  double discarded_weight = 0.0;
  /// Norm of the untruncated spectrum.
  double norm = 0.0;
};

SvdOutcome svd_truncate(const DenseTensor& t, std::span<const Index> rows,
                        const TruncationPolicy& policy,
                        IndexRole bond_role = IndexRole::bond);
SvdOutcome svd_truncate(const DenseTensor& t, std::initializer_list<Index> rows,
                        const TruncationPolicy& policy,
                        IndexRole bond_role = IndexRole::bond);

/// Thin QR with the diagonal of R real and nonnegative.
struct QrFactors {
  Matrix q;
  Matrix r;
};
QrFactors thin_qr(const Matrix& m);

/// Isometric factor of a thin QR; requires rows >= cols.
Matrix qr_isometrize(const Matrix& m);

/// Frobenius norm of m^dagger m - 1.
double isometry_error(const Matrix& m);

/// Haar-distributed unitary of the given size (QR of a complex Ginibre
/// matrix with the phase fix).
template <class Rng>
Matrix random_unitary(std::int64_t n, Rng& rng);

/// Complex standard Gaussian matrix.
template <class Rng>
Matrix random_gaussian(std::int64_t rows, std::int64_t cols, Rng& rng);

}  // namespace lpdo

#include "lpdo/tensor_random.ipp"
