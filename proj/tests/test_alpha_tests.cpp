#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "alphasign/alpha_tests.hpp"
#include "alphasign/distributions.hpp"
#include "alphasign/rng.hpp"
#include "alphasign/spatial_sign.hpp"

using namespace alphasign;

namespace {

MatrixXd gaussian(Index rows, Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Panel noise_panel(Index T, Index N, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Panel panel;
  panel.factors = gaussian(T, p, rng);
  panel.returns = gaussian(T, N, rng);
  return panel;
}

MatrixXd unit_rows(Index T, Index N, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd U = gaussian(T, N, rng);
  for (Index t = 0; t < T; ++t) U.row(t) /= U.row(t).norm();
  return U;
}

// sum identity: ||sum_t h_t u_t||^2 - sum_t h_t^2 ||u_t||^2
double q_by_identity(const MatrixXd& U, const VectorXd& h) {
  VectorXd s = U.transpose() * h;
  double diag = 0.0;
  for (Index t = 0; t < U.rows(); ++t)
    diag += h(t) * h(t) * U.row(t).squaredNorm();
  double hh = h.squaredNorm();
  return static_cast<double>(U.cols()) / hh * (s.squaredNorm() - diag);
}

// straight-line reading of the leave-two-out display, no shared code with
// the library implementation
double tr_r2_transcription(const Panel& panel, const FactorFit& fit,
                           const VectorXd& D) {
  const Index T = panel.T();
  const Index N = panel.N();
  const Index p = panel.p();
  const VectorXd& h = fit.h;
  double acc = 0.0;
  for (Index t1 = 0; t1 < T; ++t1) {
    for (Index t2 = 0; t2 < T; ++t2) {
      if (t1 == t2) continue;
      std::vector<Index> retained;
      for (Index t = 0; t < T; ++t)
        if (t != t1 && t != t2) retained.push_back(t);
      const Index m1 = (static_cast<Index>(retained.size()) + 1) / 2;
      auto fit_half = [&](Index lo, Index hi) {
        MatrixXd gram = MatrixXd::Zero(p, p);
        MatrixXd mom = MatrixXd::Zero(p, N);
        for (Index k = lo; k < hi; ++k) {
          VectorXd x = panel.factors.row(retained[k]);
          gram += x * x.transpose();
          mom += x * panel.returns.row(retained[k]);
        }
        return MatrixXd(gram.ldlt().solve(mom));  // p x N
      };
      MatrixXd b1 = fit_half(0, m1);
      MatrixXd b2 = fit_half(m1, static_cast<Index>(retained.size()));
      auto sign_row = [&](Index t, const MatrixXd& b) {
        VectorXd resid =
            (panel.returns.row(t) - panel.factors.row(t) * b).transpose();
        VectorXd xi = resid.array() / D.array().sqrt();
        return spatial_sign(xi);
      };
      double d = sign_row(t1, b1).dot(sign_row(t2, b2));
      acc += h(t1) * h(t1) * h(t2) * h(t2) * d * d;
    }
  }
  double omega = fit.omega_t;
  return static_cast<double>(N) * static_cast<double>(N) /
         (omega * (omega - 1.0)) * acc;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::GRS, Method::PY, Method::MAX, Method::COM,
                   Method::SS, Method::SM, Method::CC}) {
    CHECK(method_from_string(method_name(m)) == m);
  }
  CHECK_THROWS_AS(method_from_string("bogus"), data_error);
}

TEST_CASE("Q statistic on two orthogonal sign rows") {
  MatrixXd U = MatrixXd::Zero(2, 4);
  U(0, 0) = 1.0;
  U(1, 1) = 1.0;
  VectorXd h = VectorXd::Ones(2);
  CHECK(q_statistic(U, h) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("Q statistic on two identical sign rows") {
  MatrixXd U = MatrixXd::Zero(2, 4);
  U(0, 2) = 1.0;
  U(1, 2) = 1.0;
  VectorXd h = VectorXd::Ones(2);
  CHECK(q_statistic(U, h) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("Q statistic matches the sum identity") {
  MatrixXd U = unit_rows(6, 4, 501);
  Rng rng(502);
  VectorXd h = gaussian(6, 1, rng);
  CHECK(q_statistic(U, h) == doctest::Approx(q_by_identity(U, h)).epsilon(1e-10));
}

TEST_CASE("tr(R^2) estimate matches the transcription oracle") {
  Panel panel = noise_panel(12, 3, 1, 503);
  FactorFit fit = fit_ols(panel);
  VectorXd D = scale_only_fixpoint(residuals_eps(fit)).D;
  TrR2Estimate est = tr_r2_hat(panel, fit, D);
  CHECK(est.value ==
        doctest::Approx(tr_r2_transcription(panel, fit, D)).epsilon(1e-9));
  CHECK(est.pairs_used == 12 * 11);
}

TEST_CASE("tr(R^2) estimate near N for near-identity correlation") {
  Panel panel = noise_panel(120, 8, 1, 504);
  FactorFit fit = fit_ols(panel);
  VectorXd D = scale_only_fixpoint(residuals_eps(fit)).D;
  TrR2Estimate est = tr_r2_hat(panel, fit, D);
  CHECK(est.value / 8.0 >= 0.8);
  CHECK(est.value / 8.0 <= 1.2);
}

TEST_CASE("tr(R^2) positivity floor fires for orthogonal signs") {
  // Hand-built weights h = e_1 + e_2 give exactly one weighted pair.  The
  // retained rows carry zero returns, so the half-sample slopes vanish and
  // the two remaining sign vectors sit on different coordinates.
  const Index T = 8;
  Panel panel;
  Rng rng(505);
  panel.factors = gaussian(T, 2, rng);
  panel.returns = MatrixXd::Zero(T, 2);
  panel.returns.row(0) << 1.0, 0.0;
  panel.returns.row(1) << 0.0, 1.0;
  FactorFit fit;
  fit.beta = MatrixXd::Zero(2, 2);
  fit.alpha_hat = VectorXd::Zero(2);
  fit.Z = panel.returns;
  fit.h = VectorXd::Zero(T);
  fit.h(0) = 1.0;
  fit.h(1) = 1.0;
  fit.omega_t = 2.0;
  CHECK_THROWS_WITH_AS(tr_r2_hat(panel, fit, VectorXd::Ones(2)),
                       doctest::Contains("not positive"), numeric_error);
}

TEST_CASE("tr(R^2) estimate is invariant to asset rescaling") {
  Panel panel = noise_panel(14, 4, 2, 506);
  FactorFit fit = fit_ols(panel);
  VectorXd D = scale_only_fixpoint(residuals_eps(fit)).D;
  double base = tr_r2_hat(panel, fit, D).value;
  VectorXd s(4);
  s << 2.0, 0.1, 7.0, 1.0;
  Panel scaled = panel;
  scaled.returns = panel.returns.array().rowwise() * s.transpose().array();
  FactorFit sfit = fit_ols(scaled);
  VectorXd sD = D.array() * s.array().square();
  CHECK(tr_r2_hat(scaled, sfit, sD).value == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("SS statistic is assembled from its diagnostics") {
  Panel panel = noise_panel(24, 10, 2, 507);
  SsOptions opt;
  opt.delta_q = 1.5;
  TestResult res = test_ss(panel, opt);
  double q = res.diagnostics.at("Q");
  double tr = res.diagnostics.at("trR2_hat");
  CHECK(res.statistic ==
        doctest::Approx((q - 1.5) / std::sqrt(2.0 * tr)).epsilon(1e-12));
  CHECK(res.p_value ==
        doctest::Approx(1.0 - std_normal_cdf(res.statistic)).epsilon(1e-12));
  CHECK(res.diagnostics.at("delta_q") == 1.5);
  // shifting delta_q moves the statistic by a known amount
  TestResult base = test_ss(panel);
  CHECK(base.statistic - res.statistic ==
        doctest::Approx(1.5 / std::sqrt(2.0 * tr)).epsilon(1e-9));
}

TEST_CASE("SM statistic is assembled from its pieces") {
  Panel panel = noise_panel(30, 12, 3, 508);
  TestResult res = test_sm(panel);
  FactorFit fit = fit_ols(panel);
  MedianScaleEstimate est = median_scale_fixpoint(fit.Z);
  auto [U, r] = signs_and_radii(fit.Z, est.theta, est.D);
  ZetaHat zh = zeta_hat(U, r);
  double raw = 30.0 * (est.theta.array().square() / est.D.array()).maxCoeff() *
               zh.zeta;
  double center = 2.0 * std::log(12.0) - std::log(std::log(12.0));
  CHECK(res.statistic == doctest::Approx(raw - center).epsilon(1e-10));
  CHECK(res.p_value ==
        doctest::Approx(1.0 - gumbel_g_cdf(res.statistic)).epsilon(1e-12));
  CHECK(res.diagnostics.at("zeta_hat") == doctest::Approx(zh.zeta).epsilon(1e-12));
}

TEST_CASE("SM detects a planted spike") {
  Panel panel = noise_panel(60, 20, 3, 509);
  panel.returns.col(7).array() += 3.0;
  TestResult res = test_sm(panel);
  CHECK(res.p_value <= 1e-4);
}

TEST_CASE("CC combiner fixed points") {
  TestResult mid = test_cc(0.5, 0.5);
  CHECK(mid.statistic == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mid.p_value == doctest::Approx(0.5).epsilon(1e-12));

  TestResult low = test_cc(0.01, 0.01);
  CHECK(low.statistic == doctest::Approx(std::tan(0.49 * M_PI)).epsilon(1e-10));
  CHECK(low.p_value == doctest::Approx(0.01).epsilon(1e-10));

  TestResult high = test_cc(0.9, 0.9);
  CHECK(high.statistic == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(high.p_value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("CC combiner rejects out-of-range inputs") {
  CHECK_THROWS_WITH_AS(test_cc(0.0, 0.5), doctest::Contains("clamp upstream"),
                       data_error);
  CHECK_THROWS_AS(test_cc(0.5, 1.5), data_error);
}

TEST_CASE("CC p-value is monotone in its inputs") {
  double prev = 1.0;
  for (double p : {0.4, 0.2, 0.1, 0.05, 0.01, 0.001}) {
    double cur = test_cc(p, 0.3).p_value;
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("MAX statistic ignores a duplicated strongest asset") {
  Panel panel = noise_panel(25, 3, 2, 510);
  panel.returns.col(1).array() += 1.0;
  TestResult base = test_max(panel);
  Panel bigger;
  bigger.factors = panel.factors;
  bigger.returns = MatrixXd(25, 4);
  bigger.returns.leftCols(3) = panel.returns;
  bigger.returns.col(3) = panel.returns.col(1);
  TestResult dup = test_max(bigger);
  CHECK(dup.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
}

TEST_CASE("MAX statistic is the largest squared t and p follows the gumbel") {
  Panel panel = noise_panel(25, 6, 2, 511);
  TStatVector ts = studentized_t(panel);
  TestResult res = test_max(panel);
  CHECK(res.statistic == doctest::Approx(ts.t_sq.maxCoeff()).epsilon(1e-12));
  double center = 2.0 * std::log(6.0) - std::log(std::log(6.0));
  CHECK(res.p_value ==
        doctest::Approx(1.0 - gumbel_g_cdf(res.statistic - center))
            .epsilon(1e-12));
  CHECK(res.statistic >= 0.0);
}

TEST_CASE("PY reduces to the closed form when no correlations survive") {
  Panel panel = noise_panel(40, 12, 3, 512);
  PyOptions opt;
  opt.c = 1e9;  // threshold removes every pair
  TestResult res = test_py(panel, opt);
  CHECK(res.diagnostics.at("rho2") == 0.0);
  TStatVector ts = studentized_t(panel);
  double v = static_cast<double>(ts.v);
  double centered = ts.t_sq.sum() - 12.0 * v / (v - 2.0);
  double scale = std::sqrt(12.0) * (v / (v - 2.0)) *
                 std::sqrt(2.0 * (v - 1.0) / (v - 4.0));
  CHECK(res.statistic == doctest::Approx(centered / scale).epsilon(1e-10));
  CHECK(res.p_value ==
        doctest::Approx(1.0 - std_normal_cdf(res.statistic)).epsilon(1e-12));
}

TEST_CASE("PY keeps more correlation mass as the threshold drops") {
  Panel panel = noise_panel(40, 12, 3, 513);
  double prev = -1.0;
  for (double c : {2.0, 1.0, 0.5, 0.0}) {
    PyOptions opt;
    opt.c = c;
    double rho2 = test_py(panel, opt).diagnostics.at("rho2");
    CHECK(rho2 >= prev - 1e-15);
    prev = rho2;
  }
}

TEST_CASE("PY degrees-of-freedom guard") {
  Panel panel = noise_panel(8, 5, 3, 514);  // v = 4
  CHECK_THROWS_WITH_AS(test_py(panel),
                       doctest::Contains("insufficient degrees of freedom"),
                       numeric_error);
}

TEST_CASE("COM combiner doubling rule") {
  TestResult cap = test_com(0.5, 0.5);
  CHECK(cap.p_value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isnan(cap.statistic));
  CHECK(test_com(0.01, 0.30).p_value == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(test_com(0.9, 0.2).p_value == doctest::Approx(0.4).epsilon(1e-12));
  // rejection at gamma iff some p-value is below gamma/2
  for (double gamma : {0.01, 0.05, 0.1}) {
    for (double p1 : {0.004, 0.03, 0.2}) {
      for (double p2 : {0.02, 0.6}) {
        bool reject = test_com(p1, p2).p_value <= gamma;
        CHECK(reject == (std::min(p1, p2) <= gamma / 2.0));
      }
    }
  }
}

TEST_CASE("GRS equals the squared intercept t at N = 1") {
  Panel panel = noise_panel(20, 1, 3, 515);
  TStatVector ts = studentized_t(panel);
  TestResult res = grs_test(panel);
  CHECK(res.statistic == doctest::Approx(ts.t_sq(0)).epsilon(1e-12));
  CHECK(res.p_value ==
        doctest::Approx(1.0 - f_cdf(res.statistic, 1, 16)).epsilon(1e-12));
}

TEST_CASE("GRS vanishes for zero intercepts") {
  Rng rng(516);
  MatrixXd X = gaussian(15, 2, rng);
  MatrixXd basis(15, 3);
  basis.col(0).setOnes();
  basis.col(1) = X.col(0);
  basis.col(2) = X.col(1);
  MatrixXd E = gaussian(15, 3, rng);
  E -= basis * (basis.transpose() * basis).ldlt().solve(basis.transpose() * E);
  Panel panel;
  panel.factors = X;
  panel.returns = X * gaussian(3, 2, rng).transpose() + E;
  TestResult res = grs_test(panel);
  CHECK(std::abs(res.statistic) <= 1e-18);
  CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("GRS is invariant to a common rescaling") {
  Panel panel = noise_panel(30, 5, 3, 517);
  double base = grs_test(panel).statistic;
  Panel scaled = panel;
  scaled.returns *= 7.25;
  CHECK(grs_test(scaled).statistic == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("GRS dimension guard") {
  Panel panel = noise_panel(8, 6, 2, 518);
  CHECK_THROWS_WITH_AS(grs_test(panel),
                       doctest::Contains("GRS requires N < T - p"),
                       numeric_error);
}

TEST_CASE("clamp_pvalue window") {
  CHECK(clamp_pvalue(0.0) == 1e-15);
  CHECK(clamp_pvalue(0.3) == 0.3);
  CHECK(clamp_pvalue(2.0) == 1.0);
}

TEST_CASE("p-values are invariant to per-asset rescaling") {
  Panel panel = noise_panel(30, 8, 3, 519);
  FactorFit fit = fit_ols(panel);
  VectorXd s(8);
  s << 0.3, 2.0, 1.0, 11.0, 0.07, 5.0, 1.4, 0.9;
  Panel scaled = panel;
  scaled.returns = panel.returns.array().rowwise() * s.transpose().array();
  FactorFit sfit = fit_ols(scaled);

  CHECK(test_ss(scaled, sfit).p_value ==
        doctest::Approx(test_ss(panel, fit).p_value).epsilon(1e-6));
  CHECK(test_sm(scaled, sfit).p_value ==
        doctest::Approx(test_sm(panel, fit).p_value).epsilon(1e-6));
  CHECK(test_max(scaled, sfit).p_value ==
        doctest::Approx(test_max(panel, fit).p_value).epsilon(1e-6));
  CHECK(test_py(scaled, sfit).p_value ==
        doctest::Approx(test_py(panel, fit).p_value).epsilon(1e-6));
  double cc_base =
      test_cc(clamp_pvalue(test_ss(panel, fit).p_value),
              clamp_pvalue(test_sm(panel, fit).p_value))
          .p_value;
  double cc_scaled =
      test_cc(clamp_pvalue(test_ss(scaled, sfit).p_value),
              clamp_pvalue(test_sm(scaled, sfit).p_value))
          .p_value;
  CHECK(cc_scaled == doctest::Approx(cc_base).epsilon(1e-6));
}

TEST_CASE("p-values are invariant to asset permutation") {
  Panel panel = noise_panel(30, 8, 3, 520);
  std::vector<Index> perm{5, 2, 7, 0, 3, 6, 1, 4};
  Panel shuffled = panel;
  for (Index j = 0; j < 8; ++j)
    shuffled.returns.col(j) = panel.returns.col(perm[j]);
  FactorFit fit = fit_ols(panel);
  FactorFit pfit = fit_ols(shuffled);

  CHECK(test_ss(shuffled, pfit).p_value ==
        doctest::Approx(test_ss(panel, fit).p_value).epsilon(1e-9));
  CHECK(test_sm(shuffled, pfit).p_value ==
        doctest::Approx(test_sm(panel, fit).p_value).epsilon(1e-9));
  CHECK(test_max(shuffled, pfit).p_value ==
        doctest::Approx(test_max(panel, fit).p_value).epsilon(1e-9));
  CHECK(test_py(shuffled, pfit).p_value ==
        doctest::Approx(test_py(panel, fit).p_value).epsilon(1e-9));
  CHECK(grs_test(shuffled, pfit).p_value ==
        doctest::Approx(grs_test(panel, fit).p_value).epsilon(1e-9));
  double com_base = test_com(clamp_pvalue(test_max(panel, fit).p_value),
                             clamp_pvalue(test_py(panel, fit).p_value))
                        .p_value;
  double com_shuffled =
      test_com(clamp_pvalue(test_max(shuffled, pfit).p_value),
               clamp_pvalue(test_py(shuffled, pfit).p_value))
          .p_value;
  CHECK(com_shuffled == doctest::Approx(com_base).epsilon(1e-9));
  double cc_base = test_cc(clamp_pvalue(test_ss(panel, fit).p_value),
                           clamp_pvalue(test_sm(panel, fit).p_value))
                       .p_value;
  double cc_shuffled = test_cc(clamp_pvalue(test_ss(shuffled, pfit).p_value),
                               clamp_pvalue(test_sm(shuffled, pfit).p_value))
                           .p_value;
  CHECK(cc_shuffled == doctest::Approx(cc_base).epsilon(1e-9));
}
