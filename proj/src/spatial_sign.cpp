#include "alphasign/spatial_sign.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace alphasign {

namespace {

constexpr double kMadScale = 0.6745;  // normal-consistency constant
constexpr double kScaleFloor = 1e-12;
constexpr double kDampFactor = 100.0;

/// Columnwise median of a matrix.
VectorXd column_medians(const MatrixXd& M) {
  VectorXd med(M.cols());
  std::vector<double> buf(M.rows());
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index t = 0; t < M.rows(); ++t) buf[t] = M(t, j);
    std::sort(buf.begin(), buf.end());
    Index n = M.rows();
    med(j) = (n % 2 == 1) ? buf[n / 2] : 0.5 * (buf[n / 2 - 1] + buf[n / 2]);
  }
  return med;
}

/// Squared MAD per column around the given center, floored.
VectorXd mad_squared(const MatrixXd& M, const VectorXd& center) {
  MatrixXd dev = (M.rowwise() - center.transpose()).cwiseAbs();
  VectorXd mad = column_medians(dev);
  VectorXd d = (mad / kMadScale).array().square();
  return d.cwiseMax(kScaleFloor);
}

/// New diagonal entries N * M_j * D_j with the per-iteration change clamped
/// to a factor of kDampFactor.
void damped_update(VectorXd& D, const VectorXd& second_moment, Index N) {
  for (Index j = 0; j < D.size(); ++j) {
    double target = static_cast<double>(N) * second_moment(j) * D(j);
    target = std::min(target, D(j) * kDampFactor);
    target = std::max(target, D(j) / kDampFactor);
    D(j) = std::max(target, kScaleFloor);
  }
}

/// Pin the scale ray so that mean(r^2) = N; the fixed-point equations only
/// determine D up to an overall factor.
template <typename Estimate>
void canonicalize_ray(Estimate& est, Index N) {
  double c = est.r.squaredNorm() / static_cast<double>(est.r.size()) /
             static_cast<double>(N);
  if (!(c > 0.0)) return;
  est.D *= c;
  est.r /= std::sqrt(c);
}

}  // namespace

VectorXd spatial_sign(const VectorXd& v) {
  double n = v.norm();
  if (n == 0.0) return VectorXd::Zero(v.size());
  return v / n;
}

std::pair<MatrixXd, VectorXd> signs_and_radii(const MatrixXd& Z,
                                              const VectorXd& theta,
                                              const VectorXd& D) {
  if (D.size() != Z.cols() || theta.size() != Z.cols())
    throw data_error("signs_and_radii dimension mismatch");
  if (!(D.minCoeff() > 0.0))
    throw data_error("signs_and_radii requires positive scales");
  VectorXd dinv = D.cwiseSqrt().cwiseInverse();
  MatrixXd U(Z.rows(), Z.cols());
  VectorXd r(Z.rows());
  for (Index t = 0; t < Z.rows(); ++t) {
    VectorXd xi = (Z.row(t).transpose() - theta).cwiseProduct(dinv);
    double n = xi.norm();
    r(t) = n;
    if (n == 0.0)
      U.row(t).setZero();
    else
      U.row(t) = xi.transpose() / n;
  }
  return {U, r};
}

ScaleEstimate scale_only_fixpoint(const MatrixXd& residuals, double tol,
                                  int max_iter) {
  const Index T = residuals.rows();
  const Index N = residuals.cols();
  if (T < 2) throw data_error("scale fixed point requires T >= 2");
  if (N < 1) throw data_error("scale fixed point requires N >= 1");
  for (Index t = 0; t < T; ++t)
    if (residuals.row(t).norm() == 0.0)
      throw numeric_error("degenerate observation " + std::to_string(t));

  ScaleEstimate est;
  est.D = mad_squared(residuals, VectorXd::Zero(N));
  VectorXd zero = VectorXd::Zero(N);
  double inv_n = 1.0 / static_cast<double>(N);
  for (int iter = 1; iter <= max_iter; ++iter) {
    auto [U, r] = signs_and_radii(residuals, zero, est.D);
    VectorXd second = U.array().square().colwise().sum() /
                      static_cast<double>(T);
    est.residual_scale = (second.array() - inv_n).abs().maxCoeff();
    est.iterations = iter;
    if (est.residual_scale <= tol) {
      est.U = std::move(U);
      est.r = std::move(r);
      canonicalize_ray(est, N);
      return est;
    }
    damped_update(est.D, second, N);
  }
  throw numeric_error(
      "scale fixed point did not converge after " +
      std::to_string(max_iter) +
      " iterations; residual_scale=" + std::to_string(est.residual_scale));
}

MedianScaleEstimate median_scale_fixpoint(const MatrixXd& Z, double tol,
                                          int max_iter) {
  const Index T = Z.rows();
  const Index N = Z.cols();
  if (T < 3) throw data_error("median-scale fixed point requires T >= 3");
  if (N < 1) throw data_error("median-scale fixed point requires N >= 1");
  bool all_same = true;
  for (Index t = 1; t < T && all_same; ++t)
    all_same = (Z.row(t).array() == Z.row(0).array()).all();
  if (all_same)
    throw data_error("median-scale fixed point needs non-identical rows");

  MedianScaleEstimate est;
  est.theta = column_medians(Z);
  est.D = mad_squared(Z, est.theta);
  double inv_n = 1.0 / static_cast<double>(N);
  for (int iter = 1; iter <= max_iter; ++iter) {
    auto [U, r] = signs_and_radii(Z, est.theta, est.D);
    VectorXd sign_sum = U.colwise().sum();
    VectorXd second = U.array().square().colwise().sum() /
                      static_cast<double>(T);
    est.residual_location =
        sign_sum.cwiseAbs().maxCoeff() / static_cast<double>(T);
    est.residual_scale = (second.array() - inv_n).abs().maxCoeff();
    est.iterations = iter;
    if (est.residual_location <= tol && est.residual_scale <= tol) {
      est.U = std::move(U);
      est.r = std::move(r);
      canonicalize_ray(est, N);
      return est;
    }
    double inv_radius_sum = 0.0;  // exact hits are skipped (r = 0 rows)
    for (Index t = 0; t < T; ++t)
      if (r(t) > 0.0) inv_radius_sum += 1.0 / r(t);
    if (inv_radius_sum > 0.0)
      est.theta += est.D.cwiseSqrt().cwiseProduct(sign_sum) / inv_radius_sum;
    damped_update(est.D, second, N);
  }
  throw numeric_error(
      "median-scale fixed point did not converge after " +
      std::to_string(max_iter) + " iterations; residual_location=" +
      std::to_string(est.residual_location) +
      ", residual_scale=" + std::to_string(est.residual_scale));
}

ZetaHat zeta_hat(const MatrixXd& U, const VectorXd& r) {
  if (U.rows() != r.size())
    throw data_error("zeta_hat requires one radius per sign row");
  if (r.size() < 1) throw data_error("zeta_hat requires observations");
  const double T = static_cast<double>(r.size());
  double sum_sq = 0.0;
  double sum_inv = 0.0;
  for (Index t = 0; t < r.size(); ++t) {
    if (!(r(t) > 0.0))
      throw numeric_error("degenerate radius at observation " +
                          std::to_string(t));
    sum_sq += r(t) * r(t);
    sum_inv += 1.0 / r(t);
  }
  double e_r2 = sum_sq / T;
  double e_rinv = sum_inv / T;
  return {e_r2, e_rinv, e_r2 * e_rinv * e_rinv};
}

}  // namespace alphasign
