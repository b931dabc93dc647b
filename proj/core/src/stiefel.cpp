#include "lpdo/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lpdo {

std::string to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::s_sr ? "s_sr" : "s_vn";
}

ObjectiveKind parse_objective(std::string_view text) {
  if (text == "s_sr" || text == "sr") return ObjectiveKind::s_sr;
  if (text == "s_vn" || text == "vn") return ObjectiveKind::s_vn;
  throw PreconditionError("unknown objective '" + std::string(text) + "'");
}

Matrix herm(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix project_tangent(const Matrix& v, const Matrix& d) {
  if (v.rows() != d.rows() || v.cols() != d.cols())
    throw DimensionError("project_tangent: shape mismatch");
  return d - v * herm(v.adjoint() * d);
}

Matrix retract(const Matrix& v, const Matrix& xi, double t) {
  if (v.rows() != xi.rows() || v.cols() != xi.cols())
    throw DimensionError("retract: shape mismatch");
  if (t == 0.0) return v;
  return qr_isometrize(v + t * xi);
}

Matrix fd_gradient(const RealFunction& f, const Matrix& v, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("fd_gradient: step must be positive");
  Matrix d(v.rows(), v.cols());
  Matrix probe = v;
  const cplx steps[2] = {cplx(eps, 0.0), cplx(0.0, eps)};
  for (std::int64_t b = 0; b < v.cols(); ++b)
    for (std::int64_t a = 0; a < v.rows(); ++a) {
      double parts[2];
      for (int p = 0; p < 2; ++p) {
        probe(a, b) = v(a, b) + steps[p];
        const double up = f(probe);
        probe(a, b) = v(a, b) - steps[p];
        const double down = f(probe);
        probe(a, b) = v(a, b);
        if (!std::isfinite(up) || !std::isfinite(down))
          throw NumericalError("fd_gradient: objective not finite at coordinate (" +
                               std::to_string(a) + ", " + std::to_string(b) +
                               (p == 0 ? ", re)" : ", im)"));
        parts[p] = (up - down) / (2.0 * eps);
      }
      d(a, b) = cplx(parts[0], parts[1]);
    }
  return d;
}

Matrix StiefelObjective::gradient(const Matrix& v, double eps) const {
  return fd_gradient([this](const Matrix& m) { return value(m); }, v, eps);
}

Matrix StiefelObjective::analytic_gradient(const Matrix&) const {
  throw PreconditionError("objective has no analytic gradient");
}

void OptimizerConfig::validate() const {
  if (n_iter < 1) throw PreconditionError("optimizer: n_iter must be >= 1");
  if (!(fd_step > 0.0)) throw PreconditionError("optimizer: fd_step must be > 0");
  if (!(grad_tol >= 0.0)) throw PreconditionError("optimizer: grad_tol must be >= 0");
  if (!(initial_step > 0.0)) throw PreconditionError("optimizer: initial_step must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0))
    throw PreconditionError("optimizer: shrink must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0))
    throw PreconditionError("optimizer: armijo constant must lie in (0, 1)");
  if (max_backtracks < 1) throw PreconditionError("optimizer: max_backtracks must be >= 1");
  if (random_restarts < 0) throw PreconditionError("optimizer: random_restarts must be >= 0");
}

namespace {

IsometryResult descend(const StiefelObjective& objective, const OptimizerConfig& config,
                       Matrix start) {
  IsometryResult out;
  Matrix v = std::move(start);
  double f = objective.value(v);
  out.trace.push_back(f);
  double step = config.initial_step;
  Matrix prev_v, prev_g;
  for (int it = 0; it < config.n_iter; ++it) {
    if (f <= config.value_floor) {
      out.converged = true;
      break;
    }
    const bool exact =
        config.gradient == GradientMode::analytic && objective.has_analytic_gradient();
    const Matrix g = project_tangent(
        v, exact ? objective.analytic_gradient(v) : objective.gradient(v, config.fd_step));
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= config.grad_tol) {
      out.converged = true;
      break;
    }
    // Start slightly above the last accepted step so it can grow back.
    const double fallback = std::min(2.0 * step, 1e3 * config.initial_step);
    double first = fallback;
    if (config.bb_step && prev_v.size() > 0) {
      // Inner products in the ambient space; no vector transport.
      const Matrix s = v - prev_v;
      const Matrix y = g - prev_g;
      const double sy = std::abs((s.adjoint() * y).trace().real());
      if (sy > 0.0)
        first = std::clamp(s.squaredNorm() / sy, 1e-8 * config.initial_step,
                           1e3 * config.initial_step);
    }
    prev_v = v;
    prev_g = g;
    auto line_search = [&](double t) {
      for (int k = 0; k < config.max_backtracks; ++k, t *= config.shrink) {
        Matrix trial = retract(v, -g, t);
        const double ft = objective.value(trial);
        if (std::isfinite(ft) && ft <= f - config.armijo * t * g2) {
          v = std::move(trial);
          f = ft;
          step = t;
          return true;
        }
      }
      return false;
    };
    bool accepted = line_search(first);
    if (!accepted && first != fallback) accepted = line_search(fallback);
    if (!accepted) {
      // No decrease resolvable at this precision: treat as stationary.
      out.converged = true;
      break;
    }
    out.trace.push_back(f);
    ++out.iterations;
  }
  out.point.v = std::move(v);
  return out;
}

}  // namespace

IsometryResult optimize_isometry(const StiefelObjective& objective,
                                 const OptimizerConfig& config) {
  config.validate();
  const std::int64_t n = objective.dim();
  IsometryResult best = descend(objective, config, Matrix::Identity(n, n));
  std::mt19937_64 rng(config.seed);
  for (int r = 0; r < config.random_restarts; ++r) {
    IsometryResult cand = descend(objective, config, random_unitary(n, rng));
    if (cand.trace.back() < best.trace.back()) best = std::move(cand);
  }
  return best;
}

}  // namespace lpdo
