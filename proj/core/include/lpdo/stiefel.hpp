#pragma once

// Riemannian descent over isometries V (V^dagger V = 1).
//
// The metric is the real part of the Frobenius inner product, so the
// Euclidean gradient of a real f is D = df/dRe V + i df/dIm V and the
// directional derivative along xi is Re tr(D^dagger xi).

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lpdo/tensor.hpp"

namespace lpdo {

enum class ObjectiveKind { s_sr, s_vn };

std::string to_string(ObjectiveKind kind);
/// Accepts "s_sr"/"sr" and "s_vn"/"vn".
ObjectiveKind parse_objective(std::string_view text);

struct StiefelPoint {
  Matrix v;

  double isometry_error() const { return lpdo::isometry_error(v); }
};

/// (m + m^dagger) / 2
Matrix herm(const Matrix& m);

/// xi = D - V herm(V^dagger D).
Matrix project_tangent(const Matrix& v, const Matrix& d);

/// Q factor (nonnegative diag R) of V + t xi; t == 0 returns V unchanged.
Matrix retract(const Matrix& v, const Matrix& xi, double t);

using RealFunction = std::function<double(const Matrix&)>;

/// Central differences on every real and imaginary coordinate of V.
/// Throws NumericalError naming the coordinate if f is not finite.
Matrix fd_gradient(const RealFunction& f, const Matrix& v, double eps);

/// Scalar objective over square isometries. Subclasses may replace the
/// gradient with a cheaper exact-probe scheme.
class StiefelObjective {
 public:
  virtual ~StiefelObjective() = default;
  virtual std::int64_t dim() const = 0;
  virtual double value(const Matrix& v) const = 0;
  virtual Matrix gradient(const Matrix& v, double eps) const;
  virtual bool has_analytic_gradient() const { return false; }
  /// Exact D; throws PreconditionError unless has_analytic_gradient().
  virtual Matrix analytic_gradient(const Matrix& v) const;
};

/// Wraps a plain function.
class FunctionObjective : public StiefelObjective {
 public:
  FunctionObjective(std::int64_t dim, RealFunction f) : dim_(dim), f_(std::move(f)) {}
  std::int64_t dim() const override { return dim_; }
  double value(const Matrix& v) const override { return f_(v); }

 private:
  std::int64_t dim_;
  RealFunction f_;
};

enum class GradientMode {
  analytic,          ///< closed form when the objective has one, else finite differences
  finite_difference  ///< always StiefelObjective::gradient(v, fd_step)
};

struct OptimizerConfig {
  ObjectiveKind objective = ObjectiveKind::s_sr;
  int n_iter = 200;
  double fd_step = 1e-6;
  GradientMode gradient = GradientMode::analytic;
  double grad_tol = 1e-8;
  double initial_step = 1.0;
  double shrink = 0.5;
  /// Armijo sufficient-decrease constant.
  double armijo = 1e-4;
  int max_backtracks = 40;
  /// First trial step of each line search from the Barzilai-Borwein
  /// quotient of the last two iterates; otherwise twice the last step.
  bool bb_step = true;
  /// Objective values at or below this are treated as the global minimum.
  double value_floor = 1e-13;
  /// Extra starts from seeded Haar unitaries; the identity start always runs.
  int random_restarts = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IsometryResult {
  StiefelPoint point;
  /// Objective at every accepted iterate of the winning start, first entry
  /// at the starting point.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

IsometryResult optimize_isometry(const StiefelObjective& objective,
                                 const OptimizerConfig& config);

}  // namespace lpdo
