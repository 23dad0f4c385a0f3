#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alphasign/alpha_tests.hpp"
#include "alphasign/rng.hpp"
#include "alphasign/types.hpp"

namespace alphasign {

/// Monte Carlo scenario description.  error_model selects the noise law:
///   1 gaussian AR(1)-correlated, 2 elliptical t3, 3 normal scale mixture,
///   4 coordinatewise t3 mixed through the scatter square root.
struct ScenarioSpec {
  int error_model = 1;
  Index T = 60;
  Index N = 100;
  Index s = 0;       // sparsity of the alpha vector
  double delta = 0;  // signal energy ||alpha||^2
  double gamma = 0.05;
  int reps = 1000;
  std::uint64_t master_seed = 0;
  double rho = 0.5;        // scatter decay
  double kappa = 0.8;      // mixture weight for error_model 3
  double beta_low = 0.5;   // loading range
  double beta_high = 1.5;
  int burn_in = 50;

  void validate() const;
};

/// Three GARCH(1,1) factor paths with the fixed study coefficients,
/// initialized at f = 0, h = 1 and burned in.
MatrixXd generate_factors(Index T, int burn_in, Rng& rng);
/// Same recursion with injectable innovations (testing hook).
MatrixXd generate_factors_driven(Index T, int burn_in,
                                 const std::function<double()>& next_normal);

/// Sigma_{ij} = rho^{|i-j|}.
MatrixXd ar1_scatter(Index N, double rho = 0.5);
/// Lower Cholesky factor of a positive definite scatter matrix.
MatrixXd scatter_cholesky(const MatrixXd& sigma);

MatrixXd generate_errors(const ScenarioSpec& spec, const MatrixXd& sigma,
                         Index T, Rng& rng);
/// Same draw, taking a precomputed Cholesky factor.
MatrixXd generate_errors_chol(int error_model, const MatrixXd& L, Index T,
                              double kappa, Rng& rng);

/// First s entries sqrt(delta/s), rest zero.
VectorXd build_alpha(Index N, Index s, double delta);

Panel simulate_panel(const ScenarioSpec& spec, Rng& rng);
Panel simulate_panel_chol(const ScenarioSpec& spec, const MatrixXd& L,
                          Rng& rng);

struct StudyOptions {
  std::vector<Method> methods;
  double delta_q = 0.0;
  std::string delta_q_mode = "fixed";  // fixed | mean | quantile
  int calibration_reps = 0;            // 0 means spec.reps
  double py_c = 0.5;
};

struct RejectionRow {
  Method method;
  double rejection_rate;
  int reps;  // successful replications behind the rate
  double mc_stderr;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
  int failures = 0;
  double delta_q = 0.0;  // centering actually applied to the SS statistic
  // Aligned per-replication records for the successful replications, one
  // vector per entry of `methods`.
  std::vector<Method> methods;
  std::vector<std::vector<double>> statistics;
  std::vector<std::vector<double>> p_values;
};

/// Null-calibrated centering for the SS statistic.  mode "mean" returns the
/// Monte Carlo mean of Q; mode "quantile" matches the rejection rate at
/// spec.gamma exactly on the calibration draw.
double calibrate_delta_q(const ScenarioSpec& spec, const std::string& mode,
                         int reps);

RejectionTable run_study(const ScenarioSpec& spec, const StudyOptions& opt);

}  // namespace alphasign
