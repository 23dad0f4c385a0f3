#pragma once

#include <map>
#include <string>
#include <vector>

#include "alphasign/alpha_tests.hpp"
#include "alphasign/simulation.hpp"
#include "alphasign/types.hpp"

namespace alphasign {

/// Read a returns file (date column plus one column per ticker) and a
/// factors file (date,mkt_rf,smb,hml,rf), align the dates, and assemble the
/// excess-return panel Y = r - rf against factors [mkt_rf, smb, hml].
Panel load_panel(const std::string& returns_path,
                 const std::string& factors_path);

struct SizeRow {
  Method method;
  int scenario;
  Index T;
  Index N;
  Index s;
  double delta;
  double gamma;
  int reps;
  double reject_rate;
  double mc_stderr;
};

/// CSV schema: method,scenario,T,N,s,delta,gamma,reps,reject_rate,mc_stderr.
/// Rows are ordered by (method, scenario, T, N, delta, s).
void emit_size_table(std::vector<SizeRow> rows, const std::string& path);
std::vector<SizeRow> read_size_table(const std::string& path);

struct RollingReport {
  std::vector<std::string> window_starts;  // one per window
  std::vector<Method> methods;
  MatrixXd p_values;  // windows x methods, NaN where a window failed
  Index window = 0;
  int failures = 0;
};

struct TestOptions {
  double delta_q = 0.0;
  double py_c = 0.5;
};

/// p-values of each requested method over every length-`window` contiguous
/// row range of the panel.  Per-window numeric failures are recorded as NaN.
RollingReport rolling_pvalues(const Panel& panel, Index window,
                              const std::vector<Method>& methods,
                              const TestOptions& opt = {});

/// CSV schema: window_start,method,p_value.
void emit_rolling(const RollingReport& report, const std::string& path);

/// Flat key = value configuration file; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

std::string scenario_label(int scenario);
int scenario_from_label(const std::string& label);

}  // namespace alphasign
