#include "lpdo_harness/fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace lpdo::harness {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Model {
  const std::vector<double>& x;
  const std::vector<double>& y;

  Eigen::VectorXd residual(const Vec3& p) const {
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      r(i) = p(0) + p(1) * std::exp(-p(2) * x[i]) - y[i];
    return r;
  }

  Eigen::MatrixXd jacobian(const Vec3& p) const {
    Eigen::MatrixXd j(x.size(), 3);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::exp(-p(2) * x[i]);
      j(i, 0) = 1.0;
      j(i, 1) = e;
      j(i, 2) = -p(1) * x[i] * e;
    }
    return j;
  }
};

Vec3 initial_guess(const std::vector<double>& x, const std::vector<double>& y) {
  const double alpha = y.back();
  // log |y - alpha| = log |beta| - gamma x on the points away from alpha
  const double span = *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, sign = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - alpha;
    if (std::abs(d) <= 1e-9 * span) continue;
    const double ly = std::log(std::abs(d));
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    sign += d;
    ++m;
  }
  const double xr = std::max(x.back() - x.front(), 1e-12);
  double gamma = 1.0 / xr;
  double beta = (y.front() - alpha) * std::exp(gamma * x.front());
  if (m >= 2) {
    const double den = m * sxx - sx * sx;
    if (std::abs(den) > 1e-300) {
      const double slope = (m * sxy - sx * sy) / den;
      const double icpt = (sy - slope * sx) / m;
      if (slope < 0.0) {
        gamma = -slope;
        beta = (sign >= 0 ? 1.0 : -1.0) * std::exp(icpt);
      }
    }
  }
  return {alpha, beta, gamma};
}

}  // namespace

FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y,
                          int max_iter) {
  if (x.size() != y.size()) throw FitError("fit: x and y differ in length");
  if (x.size() < 4) throw FitError("fit: need at least 4 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitError("fit: non-finite data");
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double scale = std::max({std::abs(*ymin), std::abs(*ymax), 1e-300});
  if (*ymax - *ymin <= 1e-12 * scale)
    throw FitError("fit: degenerate model, y is constant so alpha, beta, gamma are not identifiable");

  const Model model{x, y};
  Vec3 p = initial_guess(x, y);
  Eigen::VectorXd r = model.residual(p);
  double rss = r.squaredNorm();
  double lambda = 1e-3;
  FitResult out;
  const double tiny = 1e-30 * (*ymax - *ymin) * (*ymax - *ymin) * static_cast<double>(x.size());

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    if (rss <= tiny) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd j = model.jacobian(p);
    const Mat3 jtj = j.transpose() * j;
    const Vec3 jtr = j.transpose() * r;
    bool improved = false;
    while (lambda < 1e20) {
      Mat3 a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Vec3 step = a.ldlt().solve(-jtr);
      const Vec3 trial = p + step;
      const Eigen::VectorXd rt = model.residual(trial);
      const double rss_t = rt.squaredNorm();
      if (std::isfinite(rss_t) && rss_t < rss) {
        const bool small = step.norm() <= 1e-13 * (p.norm() + 1e-13);
        const bool flat = rss - rss_t <= 1e-15 * rss;
        p = trial;
        r = rt;
        rss = rss_t;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (small || flat) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step at any damping: a minimum to working precision.
    if (!improved) out.converged = true;
    if (out.converged) break;
  }

  out.alpha = p(0);
  out.beta = p(1);
  out.gamma = p(2);
  out.residual_norm = std::sqrt(rss);
  const Eigen::MatrixXd j = model.jacobian(p);
  const Mat3 jtj = j.transpose() * j;
  Eigen::JacobiSVD<Mat3> svd(jtj);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-14 * sv(0)))
    throw FitError("fit: degenerate model, parameters are not identifiable from the data");
  const double s2 = rss / static_cast<double>(x.size() - 3);
  const Mat3 cov = s2 * jtj.inverse();
  out.sigma_alpha = std::sqrt(std::max(cov(0, 0), 0.0));
  out.sigma_beta = std::sqrt(std::max(cov(1, 1), 0.0));
  out.sigma_gamma = std::sqrt(std::max(cov(2, 2), 0.0));
  return out;
}

}  // namespace lpdo::harness
