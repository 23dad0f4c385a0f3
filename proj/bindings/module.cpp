#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alphasign/alpha_tests.hpp"
#include "alphasign/distributions.hpp"
#include "alphasign/factor_regression.hpp"
#include "alphasign/io.hpp"
#include "alphasign/rng.hpp"
#include "alphasign/simulation.hpp"
#include "alphasign/spatial_sign.hpp"
#include "alphasign/types.hpp"

namespace py = pybind11;
using namespace alphasign;

namespace {

Panel make_panel(const MatrixXd& returns, const MatrixXd& factors) {
  Panel panel;
  panel.returns = returns;
  panel.factors = factors;
  panel.validate();
  return panel;
}

py::dict result_dict(const TestResult& res) {
  py::dict out;
  out["method"] = method_name(res.method);
  out["statistic"] = res.statistic;
  out["p_value"] = res.p_value;
  py::dict diag;
  for (const auto& [key, value] : res.diagnostics) diag[key.c_str()] = value;
  out["diagnostics"] = diag;
  return out;
}

ScenarioSpec make_spec(int scenario, Index T, Index N, Index s, double delta,
                       double gamma, int reps, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.error_model = scenario;
  spec.T = T;
  spec.N = N;
  spec.s = s;
  spec.delta = delta;
  spec.gamma = gamma;
  spec.reps = reps;
  spec.master_seed = seed;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(alphasign, m) {
  m.doc() = "Robust tests for the zero-alpha hypothesis in factor models";

  py::register_exception<data_error>(m, "DataError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

  m.def("spatial_sign", &spatial_sign, py::arg("v"));

  m.def(
      "scale_fixpoint",
      [](const MatrixXd& residuals, double tol, int max_iter) {
        ScaleEstimate est = scale_only_fixpoint(residuals, tol, max_iter);
        py::dict out;
        out["D"] = est.D;
        out["U"] = est.U;
        out["r"] = est.r;
        out["iterations"] = est.iterations;
        out["residual_scale"] = est.residual_scale;
        return out;
      },
      py::arg("residuals"), py::arg("tol") = 1e-6, py::arg("max_iter") = 200);

  m.def(
      "median_scale_fixpoint",
      [](const MatrixXd& Z, double tol, int max_iter) {
        MedianScaleEstimate est = median_scale_fixpoint(Z, tol, max_iter);
        py::dict out;
        out["theta"] = est.theta;
        out["D"] = est.D;
        out["U"] = est.U;
        out["r"] = est.r;
        out["iterations"] = est.iterations;
        out["residual_location"] = est.residual_location;
        out["residual_scale"] = est.residual_scale;
        return out;
      },
      py::arg("Z"), py::arg("tol") = 1e-6, py::arg("max_iter") = 200);

  m.def(
      "zeta_hat",
      [](const MatrixXd& U, const VectorXd& r) {
        ZetaHat z = zeta_hat(U, r);
        py::dict out;
        out["e_r2"] = z.e_r2;
        out["e_rinv"] = z.e_rinv;
        out["zeta"] = z.zeta;
        return out;
      },
      py::arg("U"), py::arg("r"));

  m.def("q_statistic", &q_statistic, py::arg("U"), py::arg("h"));

  m.def(
      "fit_ols",
      [](const MatrixXd& returns, const MatrixXd& factors) {
        FactorFit fit = fit_ols(make_panel(returns, factors));
        py::dict out;
        out["beta"] = fit.beta;
        out["alpha_hat"] = fit.alpha_hat;
        out["Z"] = fit.Z;
        out["h"] = fit.h;
        out["omega_t"] = fit.omega_t;
        return out;
      },
      py::arg("returns"), py::arg("factors"));

  m.def(
      "test_ss",
      [](const MatrixXd& returns, const MatrixXd& factors, double delta_q) {
        SsOptions opt;
        opt.delta_q = delta_q;
        return result_dict(test_ss(make_panel(returns, factors), opt));
      },
      py::arg("returns"), py::arg("factors"), py::arg("delta_q") = 0.0);

  m.def(
      "test_sm",
      [](const MatrixXd& returns, const MatrixXd& factors) {
        return result_dict(test_sm(make_panel(returns, factors)));
      },
      py::arg("returns"), py::arg("factors"));

  m.def(
      "test_cc",
      [](double p_ss, double p_sm) { return result_dict(test_cc(p_ss, p_sm)); },
      py::arg("p_ss"), py::arg("p_sm"));

  m.def(
      "test_max",
      [](const MatrixXd& returns, const MatrixXd& factors) {
        return result_dict(test_max(make_panel(returns, factors)));
      },
      py::arg("returns"), py::arg("factors"));

  m.def(
      "test_py",
      [](const MatrixXd& returns, const MatrixXd& factors, double c) {
        PyOptions opt;
        opt.c = c;
        return result_dict(test_py(make_panel(returns, factors), opt));
      },
      py::arg("returns"), py::arg("factors"), py::arg("c") = 0.5);

  m.def(
      "test_com",
      [](double p_max, double p_py) {
        return result_dict(test_com(p_max, p_py));
      },
      py::arg("p_max"), py::arg("p_py"));

  m.def(
      "grs_test",
      [](const MatrixXd& returns, const MatrixXd& factors) {
        return result_dict(grs_test(make_panel(returns, factors)));
      },
      py::arg("returns"), py::arg("factors"));

  m.def(
      "simulate_panel",
      [](int scenario, Index T, Index N, Index s, double delta,
         std::uint64_t seed) {
        ScenarioSpec spec = make_spec(scenario, T, N, s, delta, 0.05, 1, seed);
        Rng rng(seed);
        Panel panel = simulate_panel(spec, rng);
        return py::make_tuple(panel.returns, panel.factors);
      },
      py::arg("scenario"), py::arg("T"), py::arg("N"), py::arg("s") = 0,
      py::arg("delta") = 0.0, py::arg("seed") = 0);

  m.def(
      "run_study",
      [](int scenario, Index T, Index N, Index s, double delta, double gamma,
         int reps, std::uint64_t seed, const std::vector<std::string>& methods,
         const std::string& delta_q_mode, int calibration_reps, double py_c) {
        ScenarioSpec spec =
            make_spec(scenario, T, N, s, delta, gamma, reps, seed);
        StudyOptions opt;
        for (const auto& name : methods)
          opt.methods.push_back(method_from_string(name));
        opt.delta_q_mode = delta_q_mode;
        opt.calibration_reps = calibration_reps;
        opt.py_c = py_c;
        RejectionTable table = run_study(spec, opt);
        py::dict out;
        py::dict rates;
        for (const auto& row : table.rows) {
          py::dict entry;
          entry["rejection_rate"] = row.rejection_rate;
          entry["reps"] = row.reps;
          entry["mc_stderr"] = row.mc_stderr;
          rates[method_name(row.method).c_str()] = entry;
        }
        out["rates"] = rates;
        out["failures"] = table.failures;
        out["delta_q"] = table.delta_q;
        py::dict stats, pvals;
        for (std::size_t k = 0; k < table.methods.size(); ++k) {
          std::string name = method_name(table.methods[k]);
          stats[name.c_str()] = table.statistics[k];
          pvals[name.c_str()] = table.p_values[k];
        }
        out["statistics"] = stats;
        out["p_values"] = pvals;
        return out;
      },
      py::arg("scenario"), py::arg("T"), py::arg("N"), py::arg("s") = 0,
      py::arg("delta") = 0.0, py::arg("gamma") = 0.05, py::arg("reps") = 1000,
      py::arg("seed") = 0, py::arg("methods") = std::vector<std::string>{"SS", "SM", "CC"},
      py::arg("delta_q_mode") = std::string("fixed"),
      py::arg("calibration_reps") = 0, py::arg("py_c") = 0.5);

  m.def("load_panel",
        [](const std::string& returns_path, const std::string& factors_path) {
          Panel panel = load_panel(returns_path, factors_path);
          return py::make_tuple(panel.returns, panel.factors);
        },
        py::arg("returns_path"), py::arg("factors_path"));

  m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
  m.def("std_normal_quantile", &std_normal_quantile, py::arg("p"));
  m.def("cauchy_cdf", &cauchy_cdf, py::arg("x"));
  m.def("gumbel_g_cdf", &gumbel_g_cdf, py::arg("x"));
  m.def("gumbel_g_quantile", &gumbel_g_quantile, py::arg("q"));
  m.def("f_cdf", &f_cdf, py::arg("x"), py::arg("d1"), py::arg("d2"));
}
