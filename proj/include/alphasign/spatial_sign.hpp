#pragma once

#include <utility>

#include "alphasign/types.hpp"

namespace alphasign {

/// v/||v||, with the zero vector mapped to itself.
VectorXd spatial_sign(const VectorXd& v);

struct ScaleEstimate {
  VectorXd D;  // diagonal entries d_i^2
  MatrixXd U;  // T x N unit signs at the fixed point
  VectorXd r;  // radii ||D^{-1/2} row||
  int iterations = 0;
  double residual_scale = 0.0;
};

/// Diagonal scale fixed point on centered residuals: alternate
/// xi_t = D^{-1/2} row_t and D <- N D^{1/2} diag(T^{-1} sum U U') D^{1/2}
/// until diag(T^{-1} sum U U') is within tol of 1/N.  The converged ray is
/// pinned by mean(r^2) = N.
ScaleEstimate scale_only_fixpoint(const MatrixXd& residuals, double tol = 1e-6,
                                  int max_iter = 200);

struct MedianScaleEstimate {
  VectorXd theta;  // spatial median of the rows
  VectorXd D;      // diagonal entries d_i^2
  MatrixXd U;      // T x N unit signs
  VectorXd r;      // radii
  int iterations = 0;
  double residual_location = 0.0;
  double residual_scale = 0.0;
};

/// Joint location and scale fixed point:
///   xi_t = D^{-1/2}(Z_t - theta)
///   theta <- theta + D^{1/2} sum U(xi_t) / sum ||xi_t||^{-1}
///   D     <- N D^{1/2} diag(T^{-1} sum U U') D^{1/2}
/// Rows exactly equal to the current theta are skipped in the sums for that
/// iteration.  The converged ray is pinned by mean(r^2) = N.
MedianScaleEstimate median_scale_fixpoint(const MatrixXd& Z, double tol = 1e-6,
                                          int max_iter = 200);

/// Unit signs and radii of D^{-1/2}(Z_t - theta) per row.
std::pair<MatrixXd, VectorXd> signs_and_radii(const MatrixXd& Z,
                                              const VectorXd& theta,
                                              const VectorXd& D);

struct ZetaHat {
  double e_r2;    // T^{-1} sum r_t^2
  double e_rinv;  // T^{-1} sum 1/r_t
  double zeta;    // e_r2 * e_rinv^2
};

ZetaHat zeta_hat(const MatrixXd& U, const VectorXd& r);

}  // namespace alphasign
