#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shrink/conditions.hpp"
#include "shrink/estimator.hpp"
#include "shrink/risk.hpp"

namespace shrink {

// Batch drivers: sweep the named estimators over geometric spectra and
// report relative risk differences 1 - R / tr(Sigma) as auditable table
// cells, plus a batched run of the minimaxity checkers.

/// Declarative description of a full experiment run.  Defaults reproduce the
/// shipped tables.
struct ExperimentConfig {
  int p = 10;
  std::vector<double> a_list = {1.01, 1.05, 1.25, 1.5};
  std::vector<std::string> estimators = {"GB", "JS"};
  std::vector<double> m_grid = {0, 2, 20, 40, 60, 80, 100};
  std::vector<double> tau_grid = {1, 5, 20, 40, 60, 80, 100};
  std::uint64_t n_mc = 1'000'000;
  std::uint64_t n_sure = 10'000'000;
  std::uint64_t seed = 0xC0FFEE;
  std::string engine = "auto";  // auto | mc | sure  (ordinary-risk table)
  std::string output = "csv";   // csv | md

  /// Throws std::runtime_error on any violated invariant.
  void validate() const;
};

/// Strict flat key-value parser: `key = value`, `#` comments, comma lists.
/// Unknown keys and malformed values are errors carrying the line number.
/// Keys: p, a_list, estimators, m_grid, tau_grid, n_mc, n_sure, seed,
/// engine, output.  Omitted keys keep their defaults.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// One cell of a results table: `index` is the mean scale m (ordinary table)
/// or the prior variance tau (ensemble table); `value` is 1 - R / tr(Sigma)
/// with its Monte-Carlo standard error, both relative to tr(Sigma).
struct TableCell {
  std::string estimator;
  double a = 0.0;
  double index = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  std::string engine;
  std::uint64_t n = 0;
};

/// Build the named rule ("GB", "JS", or "MLE") on the given spectrum, with
/// G = Sigma / sigma_1^2.  "JS" is the Stein-form profile c1 = c2 = p - 2.
ShrinkageRule make_named_rule(const std::string& name, const CovarianceSpec& cov);

/// Ordinary-risk table over (estimator, a, m).  Engine selection: "mc" and
/// "sure" force one engine; "auto" uses the sampling engine for m < 10 and
/// the unbiased-estimate engine otherwise (large means need its variance
/// reduction to resolve small differences).
std::vector<TableCell> run_table1(const ExperimentConfig& config, int threads = 0);

/// Ensemble-risk table over (estimator, a, tau), Rao-Blackwellized engine,
/// n_mc draws per cell.
std::vector<TableCell> run_table2(const ExperimentConfig& config, int threads = 0);

/// One checker verdict for one (estimator, spectrum) pair.
struct CheckRow {
  std::string estimator;
  double a = 0.0;
  std::string condition;  // ordinary | ensemble-grid | ensemble-analytic
  ConditionReport report;
};

/// Runs the ordinary and ensemble checkers for every configured
/// (estimator, a); Stein-form rules additionally get the exact analytic
/// ensemble verdict.
std::vector<CheckRow> run_check_suite(const ExperimentConfig& config);

/// Writers.  CSV applies RFC-4180 quoting; markdown emits a GitHub-style
/// pipe table.  Numeric cells use 6 significant digits.  Output is
/// byte-deterministic for a fixed input sequence.
void write_table_csv(const std::vector<TableCell>& cells, std::ostream& out);
void write_table_markdown(const std::vector<TableCell>& cells, std::ostream& out);
void write_check_csv(const std::vector<CheckRow>& rows, std::ostream& out);
void write_check_markdown(const std::vector<CheckRow>& rows, std::ostream& out);

}  // namespace shrink
