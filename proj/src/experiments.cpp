#include "shrink/experiments.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "shrink/model.hpp"
#include "shrink/rng.hpp"

namespace shrink {
namespace {

// Distinct salts decouple the two tables' random streams from each other
// while keeping every cell a pure function of (config seed, cell index).
constexpr std::uint64_t kOrdinaryTableSalt = 0x7AB1E001ULL;
constexpr std::uint64_t kEnsembleTableSalt = 0x7AB1E002ULL;

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t salt, std::uint64_t idx) {
  return mix64(mix64(base ^ salt) + idx);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_list(const std::string& value, int line) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream stream(value);
  while (std::getline(stream, current, ',')) {
    current = trim(current);
    if (current.empty()) fail_line(line, "empty element in list '" + value + "'");
    items.push_back(current);
  }
  if (items.empty()) fail_line(line, "empty list");
  return items;
}

double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail_line(line, "expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, int line) {
  if (s.empty() || s[0] == '-') {
    fail_line(line, "expected a non-negative integer, got '" + s + "'");
  }
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
  if (end != s.c_str() + s.size()) {
    fail_line(line, "expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::uint64_t>(v);
}

int parse_int(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail_line(line, "expected an integer, got '" + s + "'");
  }
  return static_cast<int>(v);
}

std::vector<double> parse_double_list(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& item : split_list(s, line)) out.push_back(parse_double(item, line));
  return out;
}

std::string fmt_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto reject = [](const std::string& what) {
    throw std::runtime_error("config: " + what);
  };
  if (p < 3) reject("p must be >= 3");
  if (a_list.empty()) reject("a_list must be non-empty");
  for (double a : a_list) {
    if (!(a >= 1.0)) reject("a_list entries must be >= 1");
  }
  if (estimators.empty()) reject("estimators must be non-empty");
  for (const auto& e : estimators) {
    if (e != "GB" && e != "JS" && e != "MLE") {
      reject("unknown estimator '" + e + "' (expected GB, JS, or MLE)");
    }
  }
  if (m_grid.empty()) reject("m_grid must be non-empty");
  for (double m : m_grid) {
    if (!(m >= 0.0)) reject("m_grid entries must be >= 0");
  }
  if (tau_grid.empty()) reject("tau_grid must be non-empty");
  for (double t : tau_grid) {
    if (!(t > 0.0)) reject("tau_grid entries must be > 0");
  }
  if (n_mc < 2) reject("n_mc must be >= 2");
  if (n_sure < 2) reject("n_sure must be >= 2");
  if (engine != "auto" && engine != "mc" && engine != "sure") {
    reject("engine must be auto, mc, or sure");
  }
  if (output != "csv" && output != "md") reject("output must be csv or md");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (key.empty()) fail_line(line, "missing key before '='");
    if (value.empty()) fail_line(line, "missing value for key '" + key + "'");

    if (key == "p") {
      cfg.p = parse_int(value, line);
    } else if (key == "a_list") {
      cfg.a_list = parse_double_list(value, line);
    } else if (key == "estimators") {
      cfg.estimators = split_list(value, line);
    } else if (key == "m_grid") {
      cfg.m_grid = parse_double_list(value, line);
    } else if (key == "tau_grid") {
      cfg.tau_grid = parse_double_list(value, line);
    } else if (key == "n_mc") {
      cfg.n_mc = parse_u64(value, line);
    } else if (key == "n_sure") {
      cfg.n_sure = parse_u64(value, line);
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, line);
    } else if (key == "engine") {
      cfg.engine = value;
    } else if (key == "output") {
      cfg.output = value;
    } else {
      fail_line(line, "unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ShrinkageRule make_named_rule(const std::string& name, const CovarianceSpec& cov) {
  const int p = cov.p();
  if (name == "GB") {
    return ShrinkageRule(cov, casella_g(cov), make_generalized_bayes(p));
  }
  if (name == "JS") {
    return ShrinkageRule(cov, casella_g(cov),
                         make_stein_form(static_cast<double>(p - 2),
                                         static_cast<double>(p - 2)));
  }
  if (name == "MLE") {
    return ShrinkageRule(cov, casella_g(cov), make_mle());
  }
  throw std::invalid_argument("make_named_rule: unknown estimator '" + name + "'");
}

std::vector<TableCell> run_table1(const ExperimentConfig& config, int threads) {
  config.validate();
  std::vector<TableCell> cells;
  std::uint64_t idx = 0;
  for (const auto& name : config.estimators) {
    for (double a : config.a_list) {
      const CovarianceSpec cov = make_geometric_covariance(config.p, a);
      const ShrinkageRule rule = make_named_rule(name, cov);
      const double tr = cov.trace();
      for (double m : config.m_grid) {
        const MeanVector theta = theta_on_diagonal(m, cov);
        const std::uint64_t seed = cell_seed(config.seed, kOrdinaryTableSalt, idx);
        const bool use_sure =
            config.engine == "sure" || (config.engine == "auto" && m >= 10.0);
        const RiskEstimate est =
            use_sure ? mc_ordinary_risk_sure(rule, theta, config.n_sure, seed, threads)
                     : mc_ordinary_risk(rule, theta, config.n_mc, seed, threads);
        cells.push_back({name, a, m, 1.0 - est.mean / tr, est.std_error / tr,
                         engine_name(est.engine), est.n});
        ++idx;
      }
    }
  }
  return cells;
}

std::vector<TableCell> run_table2(const ExperimentConfig& config, int threads) {
  config.validate();
  std::vector<TableCell> cells;
  std::uint64_t idx = 0;
  for (const auto& name : config.estimators) {
    for (double a : config.a_list) {
      const CovarianceSpec cov = make_geometric_covariance(config.p, a);
      const ShrinkageRule rule = make_named_rule(name, cov);
      const double tr = cov.trace();
      for (double tau : config.tau_grid) {
        const std::uint64_t seed = cell_seed(config.seed, kEnsembleTableSalt, idx);
        const RiskEstimate est = bayes_risk_rb(rule, tau, config.n_mc, seed, threads);
        cells.push_back({name, a, tau, 1.0 - est.mean / tr, est.std_error / tr,
                         engine_name(est.engine), est.n});
        ++idx;
      }
    }
  }
  return cells;
}

std::vector<CheckRow> run_check_suite(const ExperimentConfig& config) {
  config.validate();
  std::vector<CheckRow> rows;
  for (const auto& name : config.estimators) {
    for (double a : config.a_list) {
      const CovarianceSpec cov = make_geometric_covariance(config.p, a);
      const ShrinkageRule rule = make_named_rule(name, cov);
      rows.push_back({name, a, "ordinary", ordinary_minimax_check(rule)});
      rows.push_back({name, a, "ensemble-grid", ensemble_condition_general(rule)});
      if (std::holds_alternative<SteinForm>(rule.phi)) {
        rows.push_back({name, a, "ensemble-analytic", stein_form_ensemble_analytic(rule)});
      }
    }
  }
  return rows;
}

void write_table_csv(const std::vector<TableCell>& cells, std::ostream& out) {
  out << "estimator,a,index,value,stderr,engine,n\n";
  for (const auto& c : cells) {
    out << csv_escape(c.estimator) << ',' << fmt_num(c.a) << ',' << fmt_num(c.index)
        << ',' << fmt_num(c.value) << ',' << fmt_num(c.std_error) << ','
        << csv_escape(c.engine) << ',' << c.n << '\n';
  }
}

void write_table_markdown(const std::vector<TableCell>& cells, std::ostream& out) {
  out << "| estimator | a | index | value | stderr | engine | n |\n";
  out << "| --- | --- | --- | --- | --- | --- | --- |\n";
  for (const auto& c : cells) {
    out << "| " << c.estimator << " | " << fmt_num(c.a) << " | " << fmt_num(c.index)
        << " | " << fmt_num(c.value) << " | " << fmt_num(c.std_error) << " | "
        << c.engine << " | " << c.n << " |\n";
  }
}

namespace {

std::string witness_text(const ConditionReport& rep) {
  if (!rep.witness) return "";
  return fmt_num(*rep.witness);
}

const char* method_text(CheckMethod m) {
  return m == CheckMethod::kAnalytic ? "ANALYTIC" : "GRID";
}

}  // namespace

void write_check_csv(const std::vector<CheckRow>& rows, std::ostream& out) {
  out << "estimator,a,condition,holds,margin,witness,method,message\n";
  for (const auto& r : rows) {
    out << csv_escape(r.estimator) << ',' << fmt_num(r.a) << ','
        << csv_escape(r.condition) << ',' << (r.report.holds ? "yes" : "no") << ','
        << fmt_num(r.report.margin) << ',' << witness_text(r.report) << ','
        << method_text(r.report.method) << ',' << csv_escape(r.report.message)
        << '\n';
  }
}

void write_check_markdown(const std::vector<CheckRow>& rows, std::ostream& out) {
  out << "| estimator | a | condition | holds | margin | witness | method | message |\n";
  out << "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
  for (const auto& r : rows) {
    out << "| " << r.estimator << " | " << fmt_num(r.a) << " | " << r.condition
        << " | " << (r.report.holds ? "yes" : "no") << " | "
        << fmt_num(r.report.margin) << " | " << witness_text(r.report) << " | "
        << method_text(r.report.method) << " | " << r.report.message << " |\n";
  }
}

}  // namespace shrink
