#include "alphasign/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "alphasign/distributions.hpp"

namespace alphasign {

namespace {

// GARCH(1,1) study coefficients: market, size, value.
constexpr double kMean[3] = {0.53, 0.19, 0.19};
constexpr double kAr[3] = {0.06, 0.19, 0.05};
constexpr double kVarConst[3] = {0.89, 0.62, 0.80};
constexpr double kVarAr[3] = {0.85, 0.74, 0.76};
constexpr double kVarArch[3] = {0.11, 0.19, 0.15};

constexpr std::uint64_t kCalibrationStream = 0xCA11BULL;

/// Linear-interpolation sample quantile on a copy of the values.
double sample_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw data_error("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

bool contains(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

}  // namespace

void ScenarioSpec::validate() const {
  if (error_model < 1 || error_model > 4)
    throw data_error("scenario must be one of 1..4 (I..IV)");
  if (T < 1 || N < 1) throw data_error("scenario requires positive T and N");
  if (s < 0 || s > N) throw data_error("sparsity must satisfy 0 <= s <= N");
  if (delta < 0.0) throw data_error("signal energy must be nonnegative");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw data_error("gamma must lie in (0, 1]");
  if (reps < 1) throw data_error("at least one replication is required");
  if (!(std::fabs(rho) < 1.0)) throw data_error("|rho| must be below 1");
  if (!(kappa > 0.0) || kappa > 1.0)
    throw data_error("mixture weight must lie in (0, 1]");
  if (beta_high < beta_low) throw data_error("empty loading range");
  if (burn_in < 0) throw data_error("burn-in must be nonnegative");
}

MatrixXd generate_factors_driven(Index T, int burn_in,
                                 const std::function<double()>& next_normal) {
  if (T < 1) throw data_error("factor path requires T >= 1");
  MatrixXd F(T, 3);
  double f[3] = {0.0, 0.0, 0.0};
  double h[3] = {1.0, 1.0, 1.0};
  double z_prev[3] = {0.0, 0.0, 0.0};
  for (int step = 0; step < burn_in + static_cast<int>(T); ++step) {
    for (int k = 0; k < 3; ++k) {
      h[k] = kVarConst[k] + kVarAr[k] * h[k] +
             kVarArch[k] * z_prev[k] * z_prev[k];
      double z = next_normal();
      f[k] = kMean[k] + kAr[k] * f[k] + std::sqrt(h[k]) * z;
      z_prev[k] = z;
    }
    if (step >= burn_in)
      F.row(step - burn_in) << f[0], f[1], f[2];
  }
  return F;
}

MatrixXd generate_factors(Index T, int burn_in, Rng& rng) {
  return generate_factors_driven(T, burn_in, [&rng] { return rng.normal(); });
}

MatrixXd ar1_scatter(Index N, double rho) {
  if (N < 1) throw data_error("scatter matrix requires N >= 1");
  if (!(std::fabs(rho) < 1.0)) throw data_error("|rho| must be below 1");
  MatrixXd sigma(N, N);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j)
      sigma(i, j) = std::pow(rho, std::abs(static_cast<long>(i - j)));
  return sigma;
}

MatrixXd scatter_cholesky(const MatrixXd& sigma) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw numeric_error("scatter matrix is not positive definite");
  return llt.matrixL();
}

MatrixXd generate_errors_chol(int error_model, const MatrixXd& L, Index T,
                              double kappa, Rng& rng) {
  const Index N = L.rows();
  MatrixXd E(T, N);
  VectorXd z(N);
  switch (error_model) {
    case 1:
      for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < N; ++j) z(j) = rng.normal();
        E.row(t) = (L.triangularView<Eigen::Lower>() * z).transpose();
      }
      break;
    case 2: {
      // Elliptical t3, scaled so that the margins have unit variance.
      const double scale = 1.0 / std::sqrt(3.0);
      for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < N; ++j) z(j) = rng.normal();
        double w = rng.chi_squared(3);
        E.row(t) = (L.triangularView<Eigen::Lower>() * z).transpose() /
                   std::sqrt(w / 3.0) * scale;
      }
      break;
    }
    case 3: {
      const double scale = 1.0 / std::sqrt(kappa + 9.0 * (1.0 - kappa));
      for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < N; ++j) z(j) = rng.normal();
        double mult = (rng.uniform() < kappa) ? 1.0 : 3.0;
        E.row(t) = (L.triangularView<Eigen::Lower>() * z).transpose() * mult *
                   scale;
      }
      break;
    }
    case 4: {
      const double scale = 1.0 / std::sqrt(3.0);
      for (Index t = 0; t < T; ++t) {
        for (Index j = 0; j < N; ++j) {
          double num = rng.normal();
          double w = rng.chi_squared(3);
          z(j) = num / std::sqrt(w / 3.0) * scale;
        }
        E.row(t) = (L.triangularView<Eigen::Lower>() * z).transpose();
      }
      break;
    }
    default:
      throw data_error("scenario must be one of 1..4 (I..IV)");
  }
  return E;
}

MatrixXd generate_errors(const ScenarioSpec& spec, const MatrixXd& sigma,
                         Index T, Rng& rng) {
  MatrixXd L = scatter_cholesky(sigma);
  return generate_errors_chol(spec.error_model, L, T, spec.kappa, rng);
}

VectorXd build_alpha(Index N, Index s, double delta) {
  if (s < 0 || s > N) throw data_error("sparsity must satisfy 0 <= s <= N");
  if (delta < 0.0) throw data_error("signal energy must be nonnegative");
  VectorXd alpha = VectorXd::Zero(N);
  if (s > 0) {
    double a = std::sqrt(delta / static_cast<double>(s));
    alpha.head(s).setConstant(a);
  }
  return alpha;
}

Panel simulate_panel_chol(const ScenarioSpec& spec, const MatrixXd& L,
                          Rng& rng) {
  spec.validate();
  MatrixXd F = generate_factors(spec.T, spec.burn_in, rng);
  MatrixXd beta(spec.N, 3);
  for (Index i = 0; i < spec.N; ++i)
    for (Index k = 0; k < 3; ++k)
      beta(i, k) =
          spec.beta_low + (spec.beta_high - spec.beta_low) * rng.uniform();
  MatrixXd E =
      generate_errors_chol(spec.error_model, L, spec.T, spec.kappa, rng);
  VectorXd alpha = build_alpha(spec.N, spec.s, spec.delta);
  MatrixXd Y = F * beta.transpose() + E;
  Y.rowwise() += alpha.transpose();
  return Panel{std::move(Y), std::move(F), {}, {}};
}

Panel simulate_panel(const ScenarioSpec& spec, Rng& rng) {
  MatrixXd L = scatter_cholesky(ar1_scatter(spec.N, spec.rho));
  return simulate_panel_chol(spec, L, rng);
}

double calibrate_delta_q(const ScenarioSpec& spec, const std::string& mode,
                         int reps) {
  spec.validate();
  if (mode != "mean" && mode != "quantile")
    throw data_error("delta_q mode must be fixed, mean, or quantile");
  if (reps < 2) throw data_error("calibration needs at least 2 replications");
  ScenarioSpec null_spec = spec;
  null_spec.s = 0;
  null_spec.delta = 0.0;
  null_spec.reps = reps;
  std::uint64_t master = child_seed(spec.master_seed, kCalibrationStream);
  MatrixXd L = scatter_cholesky(ar1_scatter(spec.N, spec.rho));
  std::vector<double> qs, pivots;
  qs.reserve(reps);
  pivots.reserve(reps);
  int failures = 0;
  double z = std_normal_quantile(1.0 - spec.gamma);
  for (int k = 0; k < reps; ++k) {
    Rng rng(child_seed(master, static_cast<std::uint64_t>(k)));
    Panel panel = simulate_panel_chol(null_spec, L, rng);
    try {
      TestResult res = test_ss(panel, fit_ols(panel), SsOptions{0.0});
      double q = res.diagnostics.at("Q");
      double tr = res.diagnostics.at("trR2_hat");
      qs.push_back(q);
      pivots.push_back(q - z * std::sqrt(2.0 * tr));
    } catch (const numeric_error&) {
      ++failures;
    }
  }
  if (failures * 100 > reps)
    throw numeric_error("calibration failure rate exceeds 1%");
  if (mode == "mean") {
    double sum = 0.0;
    for (double q : qs) sum += q;
    return sum / static_cast<double>(qs.size());
  }
  return sample_quantile(pivots, 1.0 - spec.gamma);
}

RejectionTable run_study(const ScenarioSpec& spec, const StudyOptions& opt) {
  spec.validate();
  if (opt.methods.empty()) throw data_error("no methods requested");

  double delta_q = opt.delta_q;
  if (opt.delta_q_mode == "fixed") {
    // keep the configured constant
  } else if (opt.delta_q_mode == "mean" || opt.delta_q_mode == "quantile") {
    int creps = opt.calibration_reps > 0 ? opt.calibration_reps : spec.reps;
    delta_q = calibrate_delta_q(spec, opt.delta_q_mode, creps);
  } else {
    throw data_error("delta_q mode must be fixed, mean, or quantile");
  }

  const bool want_ss = contains(opt.methods, Method::SS) ||
                       contains(opt.methods, Method::CC);
  const bool want_sm = contains(opt.methods, Method::SM) ||
                       contains(opt.methods, Method::CC);
  const bool want_max = contains(opt.methods, Method::MAX) ||
                        contains(opt.methods, Method::COM);
  const bool want_py = contains(opt.methods, Method::PY) ||
                       contains(opt.methods, Method::COM);
  const bool want_grs = contains(opt.methods, Method::GRS);

  RejectionTable table;
  table.delta_q = delta_q;
  table.methods = opt.methods;
  table.statistics.assign(opt.methods.size(), {});
  table.p_values.assign(opt.methods.size(), {});

  MatrixXd L = scatter_cholesky(ar1_scatter(spec.N, spec.rho));
  SsOptions ss_opt{delta_q};
  PyOptions py_opt{opt.py_c};

  for (int k = 0; k < spec.reps; ++k) {
    Rng rng(child_seed(spec.master_seed, static_cast<std::uint64_t>(k)));
    Panel panel = simulate_panel_chol(spec, L, rng);
    std::map<Method, TestResult> results;
    try {
      FactorFit fit = fit_ols(panel);
      std::optional<TestResult> ss, sm, mx, py;
      if (want_ss) ss = test_ss(panel, fit, ss_opt);
      if (want_sm) sm = test_sm(panel, fit);
      if (want_max) mx = test_max(panel, fit);
      if (want_py) py = test_py(panel, fit, py_opt);
      if (ss) results.emplace(Method::SS, *ss);
      if (sm) results.emplace(Method::SM, *sm);
      if (mx) results.emplace(Method::MAX, *mx);
      if (py) results.emplace(Method::PY, *py);
      if (contains(opt.methods, Method::CC))
        results.emplace(Method::CC, test_cc(clamp_pvalue(ss->p_value),
                                            clamp_pvalue(sm->p_value)));
      if (contains(opt.methods, Method::COM))
        results.emplace(Method::COM, test_com(mx->p_value, py->p_value));
      if (want_grs) results.emplace(Method::GRS, grs_test(panel, fit));
    } catch (const numeric_error&) {
      ++table.failures;
      continue;
    }
    for (std::size_t m = 0; m < opt.methods.size(); ++m) {
      const TestResult& res = results.at(opt.methods[m]);
      table.statistics[m].push_back(res.statistic);
      table.p_values[m].push_back(res.p_value);
    }
  }

  if (table.failures * 100 > spec.reps)
    throw numeric_error("replication failure rate exceeds 1% (" +
                        std::to_string(table.failures) + " of " +
                        std::to_string(spec.reps) + ")");

  for (std::size_t m = 0; m < opt.methods.size(); ++m) {
    const auto& ps = table.p_values[m];
    int n = static_cast<int>(ps.size());
    int rejected = 0;
    for (double p : ps)
      if (p <= spec.gamma) ++rejected;
    double rate = n > 0 ? static_cast<double>(rejected) / n : 0.0;
    double se = n > 0 ? std::sqrt(rate * (1.0 - rate) / n) : 0.0;
    table.rows.push_back({opt.methods[m], rate, n, se});
  }
  return table;
}

}  // namespace alphasign
