#include "alphasign/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace alphasign {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw data_error("non-numeric cell at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::string> dates;
  MatrixXd values;
};

/// Date-keyed numeric CSV: first column holds period labels.
CsvTable read_dated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path);
  CsvTable table;
  table.header = split_csv_line(line);
  if (table.header.size() < 2)
    throw data_error("expected a date column and data columns in " + path);
  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw data_error("row " + std::to_string(row_no) + " of " + path +
                       " has " + std::to_string(cells.size()) +
                       " cells, expected " +
                       std::to_string(table.header.size()));
    table.dates.push_back(cells[0]);
    std::vector<double> vals(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c)
      vals[c - 1] = parse_cell(cells[c], row_no, c + 1);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw data_error("no data rows in " + path);
  for (std::size_t t = 1; t < table.dates.size(); ++t)
    if (!(table.dates[t - 1] < table.dates[t]))
      throw data_error("dates not strictly increasing at " + table.dates[t] +
                       " in " + path);
  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(rows[0].size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < rows[t].size(); ++c)
      table.values(static_cast<Index>(t), static_cast<Index>(c)) = rows[t][c];
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scenario_label(int scenario) {
  switch (scenario) {
    case 1: return "I";
    case 2: return "II";
    case 3: return "III";
    case 4: return "IV";
  }
  throw data_error("scenario must be one of 1..4 (I..IV)");
}

int scenario_from_label(const std::string& label) {
  std::string up;
  for (char c : trim(label)) up.push_back(static_cast<char>(std::toupper(c)));
  if (up == "I" || up == "1") return 1;
  if (up == "II" || up == "2") return 2;
  if (up == "III" || up == "3") return 3;
  if (up == "IV" || up == "4") return 4;
  throw data_error("scenario must be one of 1..4 (I..IV)");
}

Panel load_panel(const std::string& returns_path,
                 const std::string& factors_path) {
  CsvTable returns = read_dated_csv(returns_path);
  CsvTable factors = read_dated_csv(factors_path);
  const std::vector<std::string> expected = {"date", "mkt_rf", "smb", "hml",
                                             "rf"};
  if (factors.header != expected)
    throw data_error("factors file must have header date,mkt_rf,smb,hml,rf");
  std::size_t rows = std::min(returns.dates.size(), factors.dates.size());
  for (std::size_t t = 0; t < rows; ++t)
    if (returns.dates[t] != factors.dates[t])
      throw data_error("date mismatch at " + returns.dates[t]);
  if (returns.dates.size() != factors.dates.size()) {
    const auto& longer = returns.dates.size() > factors.dates.size()
                             ? returns.dates
                             : factors.dates;
    throw data_error("date mismatch at " + longer[rows]);
  }

  Panel panel;
  panel.factors = factors.values.leftCols(3);
  VectorXd rf = factors.values.col(3);
  panel.returns = returns.values.colwise() - rf;
  panel.dates = returns.dates;
  panel.assets.assign(returns.header.begin() + 1, returns.header.end());
  panel.validate();
  return panel;
}

void emit_size_table(std::vector<SizeRow> rows, const std::string& path) {
  std::sort(rows.begin(), rows.end(), [](const SizeRow& a, const SizeRow& b) {
    return std::make_tuple(static_cast<int>(a.method), a.scenario, a.T, a.N,
                           a.delta, a.s) <
           std::make_tuple(static_cast<int>(b.method), b.scenario, b.T, b.N,
                           b.delta, b.s);
  });
  std::ofstream out(path);
  if (!out) throw data_error("cannot write " + path);
  out << "method,scenario,T,N,s,delta,gamma,reps,reject_rate,mc_stderr\n";
  for (const SizeRow& r : rows) {
    out << method_name(r.method) << ',' << scenario_label(r.scenario) << ','
        << r.T << ',' << r.N << ',' << r.s << ',' << format_double(r.delta)
        << ',' << format_double(r.gamma) << ',' << r.reps << ','
        << format_double(r.reject_rate) << ',' << format_double(r.mc_stderr)
        << '\n';
  }
  if (!out) throw data_error("write failed for " + path);
}

std::vector<SizeRow> read_size_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path);
  if (trim(line) != "method,scenario,T,N,s,delta,gamma,reps,reject_rate,mc_stderr")
    throw data_error("unexpected header in " + path);
  std::vector<SizeRow> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 10)
      throw data_error("row " + std::to_string(row_no) + " of " + path +
                       " has " + std::to_string(cells.size()) +
                       " cells, expected 10");
    SizeRow r;
    r.method = method_from_string(cells[0]);
    r.scenario = scenario_from_label(cells[1]);
    r.T = static_cast<Index>(parse_cell(cells[2], row_no, 3));
    r.N = static_cast<Index>(parse_cell(cells[3], row_no, 4));
    r.s = static_cast<Index>(parse_cell(cells[4], row_no, 5));
    r.delta = parse_cell(cells[5], row_no, 6);
    r.gamma = parse_cell(cells[6], row_no, 7);
    r.reps = static_cast<int>(parse_cell(cells[7], row_no, 8));
    r.reject_rate = parse_cell(cells[8], row_no, 9);
    r.mc_stderr = parse_cell(cells[9], row_no, 10);
    rows.push_back(r);
  }
  return rows;
}

RollingReport rolling_pvalues(const Panel& panel, Index window,
                              const std::vector<Method>& methods,
                              const TestOptions& opt) {
  panel.validate();
  if (methods.empty()) throw data_error("no methods requested");
  const Index T = panel.T();
  const Index p = panel.p();
  if (window > T) throw data_error("window exceeds the number of periods");

  auto min_window = [&](Method m) -> Index {
    switch (m) {
      case Method::SS: return 2 * p + 4;
      case Method::SM: return std::max<Index>(3, p + 2);
      case Method::CC: return std::max<Index>(2 * p + 4, 3);
      case Method::MAX: return p + 2;
      case Method::PY: return p + 6;
      case Method::COM: return p + 6;
      case Method::GRS: return panel.N() + p + 1;
    }
    return p + 2;
  };
  for (Method m : methods)
    if (window < min_window(m))
      throw data_error("window too short for method " + method_name(m));

  RollingReport report;
  report.window = window;
  report.methods = methods;
  const Index count = T - window + 1;
  report.p_values.setConstant(count, static_cast<Index>(methods.size()),
                              std::numeric_limits<double>::quiet_NaN());
  report.window_starts.resize(count);

  SsOptions ss_opt{opt.delta_q};
  PyOptions py_opt{opt.py_c};
  for (Index w = 0; w < count; ++w) {
    Panel sub;
    sub.returns = panel.returns.middleRows(w, window);
    sub.factors = panel.factors.middleRows(w, window);
    report.window_starts[w] = panel.dates.empty()
                                  ? std::to_string(w + 1)
                                  : panel.dates[static_cast<std::size_t>(w)];
    bool failed = false;
    try {
      FactorFit fit = fit_ols(sub);
      std::map<Method, double> pv;
      auto want = [&](Method m) {
        return std::find(methods.begin(), methods.end(), m) != methods.end();
      };
      if (want(Method::SS) || want(Method::CC))
        pv[Method::SS] = test_ss(sub, fit, ss_opt).p_value;
      if (want(Method::SM) || want(Method::CC))
        pv[Method::SM] = test_sm(sub, fit).p_value;
      if (want(Method::MAX) || want(Method::COM))
        pv[Method::MAX] = test_max(sub, fit).p_value;
      if (want(Method::PY) || want(Method::COM))
        pv[Method::PY] = test_py(sub, fit, py_opt).p_value;
      if (want(Method::CC))
        pv[Method::CC] = test_cc(clamp_pvalue(pv[Method::SS]),
                                 clamp_pvalue(pv[Method::SM]))
                             .p_value;
      if (want(Method::COM))
        pv[Method::COM] = test_com(pv[Method::MAX], pv[Method::PY]).p_value;
      if (want(Method::GRS)) pv[Method::GRS] = grs_test(sub, fit).p_value;
      for (std::size_t m = 0; m < methods.size(); ++m)
        report.p_values(w, static_cast<Index>(m)) = pv.at(methods[m]);
    } catch (const numeric_error&) {
      failed = true;
    }
    if (failed) ++report.failures;
  }
  return report;
}

void emit_rolling(const RollingReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write " + path);
  out << "window_start,method,p_value\n";
  for (Index w = 0; w < report.p_values.rows(); ++w)
    for (std::size_t m = 0; m < report.methods.size(); ++m)
      out << report.window_starts[static_cast<std::size_t>(w)] << ','
          << method_name(report.methods[m]) << ','
          << format_double(report.p_values(w, static_cast<Index>(m))) << '\n';
  if (!out) throw data_error("write failed for " + path);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw data_error("config line " + std::to_string(row_no) +
                       " is not key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw data_error("config line " + std::to_string(row_no) +
                       " has an empty key");
    out[key] = value;
  }
  return out;
}

}  // namespace alphasign
