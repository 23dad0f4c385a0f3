#include "alphasign/factor_regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace alphasign {

namespace {

constexpr double kCondBound = 1e12;
constexpr double kOmegaFloor = 1e-8;  // on omega_T / T

/// Inverse of X'X through its eigendecomposition, guarding the condition
/// number.
MatrixXd gram_inverse(const MatrixXd& gram, const char* rank_message) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  const VectorXd& ev = es.eigenvalues();
  double lo = ev.minCoeff();
  double hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > kCondBound) throw numeric_error(rank_message);
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

void Panel::validate() const {
  if (returns.rows() != factors.rows())
    throw data_error("returns and factors disagree on the number of periods");
  if (N() < 1 || p() < 1) throw data_error("panel needs assets and factors");
  if (T() < p() + 2)
    throw data_error("panel requires T >= p + 2 periods");
  if (!returns.allFinite() || !factors.allFinite())
    throw data_error("panel contains non-finite entries");
  if (!dates.empty() && static_cast<Index>(dates.size()) != T())
    throw data_error("date labels do not match the number of periods");
  if (!assets.empty() && static_cast<Index>(assets.size()) != N())
    throw data_error("asset labels do not match the number of assets");
}

AnnihilatorWeights annihilator_weights(const MatrixXd& factors) {
  const Index T = factors.rows();
  MatrixXd gram_inv =
      gram_inverse(factors.transpose() * factors, "rank-deficient factors");
  VectorXd xt1 = factors.colwise().sum();
  VectorXd h = VectorXd::Ones(T) - factors * (gram_inv * xt1);
  double omega = h.squaredNorm();
  if (omega / static_cast<double>(T) <= kOmegaFloor)
    throw numeric_error("degenerate: factors span the intercept");
  return {h, omega};
}

FactorFit fit_ols(const Panel& panel) {
  panel.validate();
  const MatrixXd& Y = panel.returns;
  const MatrixXd& X = panel.factors;
  const Index T = panel.T();
  MatrixXd gram_inv =
      gram_inverse(X.transpose() * X, "rank-deficient factors");
  VectorXd xt1 = X.colwise().sum();
  VectorXd h = VectorXd::Ones(T) - X * (gram_inv * xt1);
  double omega = h.squaredNorm();
  if (omega / static_cast<double>(T) <= kOmegaFloor)
    throw numeric_error("intercept not identifiable");
  MatrixXd beta = (gram_inv * (X.transpose() * Y)).transpose();  // N x p
  MatrixXd Z = Y - X * beta.transpose();
  VectorXd alpha = Z.transpose() * h / omega;  // h'Z_i = h'Y_i since h'X = 0
  return {beta, alpha, Z, h, omega};
}

MatrixXd residuals_eps(const FactorFit& fit) {
  return fit.Z - fit.h * fit.alpha_hat.transpose();
}

MatrixXd leave_out_ols(const Panel& panel, const std::vector<Index>& keep) {
  panel.validate();
  const Index p = panel.p();
  if (static_cast<Index>(keep.size()) < p + 1)
    throw data_error("leave_out_ols needs at least p + 1 rows");
  std::unordered_set<Index> seen;
  for (Index t : keep) {
    if (t < 0 || t >= panel.T())
      throw data_error("leave_out_ols index out of range");
    if (!seen.insert(t).second)
      throw data_error("leave_out_ols received a duplicate index");
  }
  MatrixXd gram = MatrixXd::Zero(p, p);
  MatrixXd moment = MatrixXd::Zero(p, panel.N());
  for (Index t : keep) {
    VectorXd x = panel.factors.row(t);
    gram.noalias() += x * x.transpose();
    moment.noalias() += x * panel.returns.row(t);
  }
  MatrixXd gram_inv = gram_inverse(
      gram, ("restricted Gram is rank deficient (|keep| = " +
             std::to_string(keep.size()) + ")")
                .c_str());
  return (gram_inv * moment).transpose();
}

TStatVector studentized_t(const Panel& panel) {
  return studentized_t(panel, fit_ols(panel));
}

TStatVector studentized_t(const Panel& panel, const FactorFit& fit) {
  const Index v = panel.T() - panel.p() - 1;
  if (v < 1) throw data_error("studentized t requires T > p + 1");
  MatrixXd eps = residuals_eps(fit);
  VectorXd t_sq(panel.N());
  for (Index i = 0; i < panel.N(); ++i) {
    double rss = eps.col(i).squaredNorm();
    if (!(rss > 0.0))
      throw numeric_error("degenerate asset " + std::to_string(i));
    double a = fit.alpha_hat(i);
    t_sq(i) = a * a * fit.omega_t * static_cast<double>(v) / rss;
  }
  return {t_sq, v};
}

}  // namespace alphasign
