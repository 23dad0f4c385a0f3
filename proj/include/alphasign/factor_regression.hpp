#pragma once

#include <vector>

#include "alphasign/types.hpp"

namespace alphasign {

struct AnnihilatorWeights {
  VectorXd h;      // residual of 1_T after projecting out the factor columns
  double omega_t;  // h'h
};

/// h = (I - X(X'X)^{-1}X') 1_T and omega_T = h'h.
AnnihilatorWeights annihilator_weights(const MatrixXd& factors);

struct FactorFit {
  MatrixXd beta;      // N x p
  VectorXd alpha_hat; // N
  MatrixXd Z;         // T x N, Y - X beta'
  VectorXd h;         // T
  double omega_t;
};

/// Per-asset OLS slopes plus the intercept estimates alpha_hat_i = Y_i'h/omega_T.
FactorFit fit_ols(const Panel& panel);

/// Intercept-adjusted residuals eps_i = Z_i - alpha_hat_i h, column per asset.
MatrixXd residuals_eps(const FactorFit& fit);

/// OLS slopes using only the rows listed in `keep`; matches fit_ols on the
/// row-restricted panel.
MatrixXd leave_out_ols(const Panel& panel, const std::vector<Index>& keep);

struct TStatVector {
  VectorXd t_sq;  // squared t statistics, length N
  Index v;        // T - p - 1
};

TStatVector studentized_t(const Panel& panel);
TStatVector studentized_t(const Panel& panel, const FactorFit& fit);

}  // namespace alphasign
