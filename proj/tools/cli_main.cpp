#include "cli_main.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alphasign/alpha_tests.hpp"
#include "alphasign/io.hpp"
#include "alphasign/simulation.hpp"

namespace alphasign {

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Method> parse_methods(const std::string& csv) {
  std::vector<Method> methods;
  for (const std::string& name : split_list(csv))
    methods.push_back(method_from_string(name));
  if (methods.empty()) throw data_error("no methods requested");
  return methods;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  for (const std::string& item : split_list(csv)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw data_error("not a number: " + item);
    }
  }
  if (out.empty()) throw data_error("empty numeric list");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Shared simulation flags; config values become defaults, explicit flags win.
struct SimFlags {
  std::string scenario = "I";
  ScenarioSpec spec;
  std::string methods = "ss,sm,cc";
  double delta_q = 0.0;
  std::string delta_q_mode = "fixed";
  int calibration_reps = 0;
  double py_c = 0.5;
  std::string out;
};

void add_sim_options(CLI::App* cmd, SimFlags& f,
                     const std::map<std::string, std::string>& cfg) {
  auto opt = [&](CLI::Option* o, const std::string& key) {
    auto it = cfg.find(key);
    if (it != cfg.end()) {
      try {
        o->default_val(it->second);
      } catch (const CLI::Error&) {
        throw data_error("bad config value for " + key + ": " + it->second);
      }
    }
  };
  opt(cmd->add_option("--scenario", f.scenario, "error scenario I..IV"),
      "scenario");
  opt(cmd->add_option("--T", f.spec.T, "periods per panel"), "T");
  opt(cmd->add_option("--N", f.spec.N, "assets per panel"), "N");
  opt(cmd->add_option("--reps", f.spec.reps, "Monte Carlo replications"),
      "reps");
  opt(cmd->add_option("--seed", f.spec.master_seed, "master seed"), "seed");
  opt(cmd->add_option("--gamma", f.spec.gamma, "nominal level"), "gamma");
  opt(cmd->add_option("--methods", f.methods, "comma-separated method list"),
      "methods");
  opt(cmd->add_option("--delta-q", f.delta_q, "fixed centering for SS"),
      "delta-q");
  opt(cmd->add_option("--delta-q-mode", f.delta_q_mode,
                      "fixed, mean, or quantile"),
      "delta-q-mode");
  opt(cmd->add_option("--calibration-reps", f.calibration_reps,
                      "replications for delta_q calibration (0 = reps)"),
      "calibration-reps");
  opt(cmd->add_option("--py-c", f.py_c, "PY correlation threshold constant"),
      "py-c");
  opt(cmd->add_option("--rho", f.spec.rho, "scatter decay"), "rho");
  opt(cmd->add_option("--kappa", f.spec.kappa, "mixture weight, scenario III"),
      "kappa");
  opt(cmd->add_option("--beta-low", f.spec.beta_low, "loading lower bound"),
      "beta-low");
  opt(cmd->add_option("--beta-high", f.spec.beta_high, "loading upper bound"),
      "beta-high");
  opt(cmd->add_option("--burn-in", f.spec.burn_in, "factor burn-in length"),
      "burn-in");
  opt(cmd->add_option("--out", f.out, "output CSV path"), "out");
}

StudyOptions study_options(const SimFlags& f) {
  StudyOptions opt;
  opt.methods = parse_methods(f.methods);
  opt.delta_q = f.delta_q;
  opt.delta_q_mode = f.delta_q_mode;
  opt.calibration_reps = f.calibration_reps;
  opt.py_c = f.py_c;
  return opt;
}

void print_table(const ScenarioSpec& spec, const RejectionTable& table) {
  for (const RejectionRow& row : table.rows)
    std::cout << "method=" << method_name(row.method)
              << " scenario=" << scenario_label(spec.error_model)
              << " T=" << spec.T << " N=" << spec.N << " s=" << spec.s
              << " delta=" << fmt(spec.delta) << " gamma=" << fmt(spec.gamma)
              << " reps=" << row.reps << " reject_rate="
              << fmt(row.rejection_rate) << " mc_stderr=" << fmt(row.mc_stderr)
              << '\n';
}

std::vector<SizeRow> table_rows(const ScenarioSpec& spec,
                                const RejectionTable& table) {
  std::vector<SizeRow> rows;
  for (const RejectionRow& row : table.rows)
    rows.push_back({row.method, spec.error_model, spec.T, spec.N, spec.s,
                    spec.delta, spec.gamma, row.reps, row.rejection_rate,
                    row.mc_stderr});
  return rows;
}

/// The --config file is read before CLI11 sees the other flags so that its
/// values act as defaults.
std::map<std::string, std::string> preload_config(int argc,
                                                  const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) return {};
      return read_config(argv[i + 1]);
    }
    if (arg.rfind("--config=", 0) == 0)
      return read_config(arg.substr(std::string("--config=").size()));
  }
  return {};
}

int run_simulate_size(const SimFlags& f) {
  ScenarioSpec spec = f.spec;
  spec.error_model = scenario_from_label(f.scenario);
  spec.s = 0;
  spec.delta = 0.0;
  RejectionTable table = run_study(spec, study_options(f));
  print_table(spec, table);
  std::cout << "study failures=" << table.failures
            << " delta_q=" << fmt(table.delta_q) << '\n';
  std::string out = f.out.empty() ? "size_table.csv" : f.out;
  emit_size_table(table_rows(spec, table), out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int run_simulate_power(const SimFlags& f, const std::string& s_list,
                       const std::string& delta_list) {
  ScenarioSpec base = f.spec;
  base.error_model = scenario_from_label(f.scenario);
  std::vector<SizeRow> rows;
  int failures = 0;
  for (double s_val : parse_doubles(s_list)) {
    for (double delta : parse_doubles(delta_list)) {
      ScenarioSpec spec = base;
      spec.s = static_cast<Index>(s_val);
      spec.delta = delta;
      RejectionTable table = run_study(spec, study_options(f));
      failures += table.failures;
      print_table(spec, table);
      auto batch = table_rows(spec, table);
      rows.insert(rows.end(), batch.begin(), batch.end());
    }
  }
  std::cout << "study failures=" << failures << '\n';
  std::string out = f.out.empty() ? "power_table.csv" : f.out;
  emit_size_table(rows, out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int run_test(const std::string& returns_path, const std::string& factors_path,
             const std::string& methods_csv, double delta_q, double py_c,
             const std::string& out) {
  Panel panel = load_panel(returns_path, factors_path);
  std::vector<Method> methods = parse_methods(methods_csv);
  FactorFit fit = fit_ols(panel);
  std::map<Method, TestResult> results;
  auto want = [&](Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  };
  if (want(Method::SS) || want(Method::CC))
    results.emplace(Method::SS, test_ss(panel, fit, SsOptions{delta_q}));
  if (want(Method::SM) || want(Method::CC))
    results.emplace(Method::SM, test_sm(panel, fit));
  if (want(Method::MAX) || want(Method::COM))
    results.emplace(Method::MAX, test_max(panel, fit));
  if (want(Method::PY) || want(Method::COM))
    results.emplace(Method::PY, test_py(panel, fit, PyOptions{py_c}));
  if (want(Method::CC))
    results.emplace(Method::CC,
                    test_cc(clamp_pvalue(results.at(Method::SS).p_value),
                            clamp_pvalue(results.at(Method::SM).p_value)));
  if (want(Method::COM))
    results.emplace(Method::COM, test_com(results.at(Method::MAX).p_value,
                                          results.at(Method::PY).p_value));
  if (want(Method::GRS)) results.emplace(Method::GRS, grs_test(panel, fit));

  for (Method m : methods) {
    const TestResult& res = results.at(m);
    std::cout << "method=" << method_name(m) << " statistic="
              << fmt(res.statistic) << " p_value=" << fmt(res.p_value) << '\n';
  }
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw data_error("cannot write " + out);
    file << "method,statistic,p_value\n";
    for (Method m : methods) {
      const TestResult& res = results.at(m);
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n",
                    method_name(m).c_str(), res.statistic, res.p_value);
      file << buf;
    }
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

int run_rolling(const std::string& returns_path,
                const std::string& factors_path, Index window,
                const std::string& methods_csv, double delta_q, double py_c,
                double gamma, const std::string& out) {
  Panel panel = load_panel(returns_path, factors_path);
  std::vector<Method> methods = parse_methods(methods_csv);
  RollingReport report =
      rolling_pvalues(panel, window, methods, TestOptions{delta_q, py_c});
  std::cout << "windows=" << report.p_values.rows()
            << " failures=" << report.failures << '\n';
  for (std::size_t m = 0; m < methods.size(); ++m) {
    Index rejections = 0;
    Index valid = 0;
    for (Index w = 0; w < report.p_values.rows(); ++w) {
      double p = report.p_values(w, static_cast<Index>(m));
      if (std::isnan(p)) continue;
      ++valid;
      if (p <= gamma) ++rejections;
    }
    double ratio =
        valid > 0 ? static_cast<double>(rejections) / valid : 0.0;
    std::cout << "method=" << method_name(methods[m]) << " windows=" << valid
              << " rejections=" << rejections << " rejection_ratio="
              << fmt(ratio) << " gamma=" << fmt(gamma) << '\n';
  }
  std::string path = out.empty() ? "rolling.csv" : out;
  emit_rolling(report, path);
  std::cout << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int cli_run(int argc, const char* const* argv) {
  try {
    std::map<std::string, std::string> cfg = preload_config(argc, argv);

    CLI::App app{"spatial-sign alpha tests for factor pricing panels"};
    app.require_subcommand(1);

    std::string config_path;

    auto* size_cmd =
        app.add_subcommand("simulate-size", "null rejection rates");
    SimFlags size_flags;
    size_cmd->add_option("--config", config_path, "flat key = value file");
    add_sim_options(size_cmd, size_flags, cfg);

    auto* power_cmd =
        app.add_subcommand("simulate-power", "rejection rates under signal");
    SimFlags power_flags;
    std::string s_list = "2";
    std::string delta_list = "0.5";
    power_cmd->add_option("--config", config_path, "flat key = value file");
    add_sim_options(power_cmd, power_flags, cfg);
    auto set_cfg = [&cfg](CLI::Option* o, const std::string& key) {
      auto it = cfg.find(key);
      if (it != cfg.end()) o->default_val(it->second);
    };
    set_cfg(power_cmd->add_option("--s", s_list, "sparsity list"), "s");
    set_cfg(power_cmd->add_option("--delta", delta_list, "energy list"),
            "delta");

    auto* test_cmd = app.add_subcommand("test", "one-shot tests on files");
    std::string returns_path, factors_path, test_out;
    std::string test_methods = "ss,sm,cc";
    double test_delta_q = 0.0, test_py_c = 0.5;
    test_cmd->add_option("--config", config_path, "flat key = value file");
    set_cfg(test_cmd->add_option("--returns", returns_path, "returns CSV")
                ->required(),
            "returns");
    set_cfg(test_cmd->add_option("--factors", factors_path, "factors CSV")
                ->required(),
            "factors");
    set_cfg(test_cmd->add_option("--methods", test_methods, "method list"),
            "methods");
    set_cfg(test_cmd->add_option("--delta-q", test_delta_q, "SS centering"),
            "delta-q");
    set_cfg(test_cmd->add_option("--py-c", test_py_c, "PY threshold"), "py-c");
    set_cfg(test_cmd->add_option("--out", test_out, "result CSV"), "out");

    auto* roll_cmd = app.add_subcommand("rolling", "rolling-window p-values");
    std::string roll_returns, roll_factors, roll_out;
    std::string roll_methods = "ss,sm";
    Index window = 0;
    double roll_delta_q = 0.0, roll_py_c = 0.5, roll_gamma = 0.05;
    roll_cmd->add_option("--config", config_path, "flat key = value file");
    set_cfg(roll_cmd->add_option("--returns", roll_returns, "returns CSV")
                ->required(),
            "returns");
    set_cfg(roll_cmd->add_option("--factors", roll_factors, "factors CSV")
                ->required(),
            "factors");
    set_cfg(roll_cmd->add_option("--window", window, "window length")
                ->required(),
            "window");
    set_cfg(roll_cmd->add_option("--methods", roll_methods, "method list"),
            "methods");
    set_cfg(roll_cmd->add_option("--delta-q", roll_delta_q, "SS centering"),
            "delta-q");
    set_cfg(roll_cmd->add_option("--py-c", roll_py_c, "PY threshold"), "py-c");
    set_cfg(roll_cmd->add_option("--gamma", roll_gamma, "summary level"),
            "gamma");
    set_cfg(roll_cmd->add_option("--out", roll_out, "output CSV"), "out");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }

    if (size_cmd->parsed()) return run_simulate_size(size_flags);
    if (power_cmd->parsed())
      return run_simulate_power(power_flags, s_list, delta_list);
    if (test_cmd->parsed())
      return run_test(returns_path, factors_path, test_methods, test_delta_q,
                      test_py_c, test_out);
    if (roll_cmd->parsed())
      return run_rolling(roll_returns, roll_factors, window, roll_methods,
                         roll_delta_q, roll_py_c, roll_gamma, roll_out);
    return 1;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace alphasign
