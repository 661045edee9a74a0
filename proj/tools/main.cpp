// Command-line driver: batch tables, condition checks, and one-off
// evaluations of the shrinkage estimators and their risk engines.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shrink/conditions.hpp"
#include "shrink/estimator.hpp"
#include "shrink/experiments.hpp"
#include "shrink/model.hpp"
#include "shrink/phi.hpp"
#include "shrink/risk.hpp"

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    stream = &file;
  }
};

void print_scalar_result(std::ostream& out, const std::string& estimator, int p,
                         double a, const char* index_name, double index_value,
                         const shrink::RiskEstimate& est, double tr) {
  out << "estimator: " << estimator << "\n";
  out << "p: " << p << "\n";
  out << "a: " << fmt6(a) << "\n";
  out << index_name << ": " << fmt6(index_value) << "\n";
  out << "engine: " << shrink::engine_name(est.engine) << "\n";
  out << "n: " << est.n << "\n";
  out << "risk: " << fmt6(est.mean) << "\n";
  out << "stderr: " << fmt6(est.std_error) << "\n";
  out << "tr_sigma: " << fmt6(tr) << "\n";
  out << "value: " << fmt6(1.0 - est.mean / tr) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heteroscedastic shrinkage estimators: risk tables, "
               "minimaxity checks, and pointwise evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string output_format = "csv";
  std::uint64_t seed = 0xC0FFEE;
  int threads = 0;
  app.add_option("--config", config_path, "Path to a key = value config file");
  app.add_option("--seed", seed, "Base seed for all random streams");
  app.add_option("--output", output_format, "Table format: csv or md")
      ->check(CLI::IsMember({"csv", "md"}));
  app.add_option("--out", out_path, "Write output to this file instead of stdout");
  app.add_option("--threads", threads, "Worker threads (0 = hardware default)");

  // Overridable experiment fields shared by table1/table2/check.
  int p = 10;
  std::vector<double> a_list, m_grid, tau_grid;
  std::vector<std::string> estimators;
  std::uint64_t n_mc = 0, n_sure = 0;
  std::string engine;

  auto add_experiment_flags = [&](CLI::App* sub, bool with_m, bool with_tau) {
    sub->add_option("--p", p, "Dimension");
    sub->add_option("--a-list", a_list, "Spectrum decay rates")->delimiter(',');
    sub->add_option("--estimators", estimators, "Subset of GB,JS,MLE")
        ->delimiter(',');
    if (with_m) sub->add_option("--m-grid", m_grid, "Mean scales")->delimiter(',');
    if (with_tau) {
      sub->add_option("--tau-grid", tau_grid, "Prior variances")->delimiter(',');
    }
    sub->add_option("--n-mc", n_mc, "Sampling-engine draws per cell");
    if (with_m) {
      sub->add_option("--n-sure", n_sure, "Unbiased-estimate-engine draws per cell");
      sub->add_option("--engine", engine, "auto, mc, or sure")
          ->check(CLI::IsMember({"auto", "mc", "sure"}));
    }
  };

  CLI::App* table1 = app.add_subcommand(
      "table1", "Ordinary-risk table: value = 1 - R(theta_m) / tr(Sigma)");
  add_experiment_flags(table1, /*with_m=*/true, /*with_tau=*/false);
  CLI::App* table2 = app.add_subcommand(
      "table2", "Ensemble-risk table: value = 1 - Rbar(tau) / tr(Sigma)");
  add_experiment_flags(table2, /*with_m=*/false, /*with_tau=*/true);
  CLI::App* check = app.add_subcommand(
      "check", "Minimaxity condition reports for the configured rules");
  add_experiment_flags(check, /*with_m=*/false, /*with_tau=*/false);

  // Scalar commands.
  std::string estimator_name = "GB";
  double a = 1.5, m = 0.0, tau = 1.0;
  std::uint64_t n_scalar = 1'000'000;
  std::string risk_engine = "mc";
  std::string bayes_engine = "rb";

  CLI::App* risk = app.add_subcommand("risk", "Ordinary risk of one rule at one mean");
  risk->add_option("--estimator", estimator_name, "GB, JS, or MLE");
  risk->add_option("--p", p, "Dimension");
  risk->add_option("--a", a, "Spectrum decay rate");
  risk->add_option("--m", m, "Mean scale");
  risk->add_option("--engine", risk_engine, "mc or sure")
      ->check(CLI::IsMember({"mc", "sure"}));
  risk->add_option("--n", n_scalar, "Draws");

  CLI::App* bayes = app.add_subcommand(
      "bayes-risk", "Ensemble risk of one rule under the normal prior");
  bayes->add_option("--estimator", estimator_name, "GB, JS, or MLE");
  bayes->add_option("--p", p, "Dimension");
  bayes->add_option("--a", a, "Spectrum decay rate");
  bayes->add_option("--tau", tau, "Prior variance");
  bayes->add_option("--engine", bayes_engine, "rb, direct, or dirichlet")
      ->check(CLI::IsMember({"rb", "direct", "dirichlet"}));
  bayes->add_option("--n", n_scalar, "Draws");

  std::string family = "gb";
  double c1 = 8.0, c2 = 8.0;
  std::vector<double> z_points;
  CLI::App* phi_cmd = app.add_subcommand("phi-eval", "Evaluate a shrinkage profile");
  phi_cmd->add_option("--family", family, "gb, stein, or mle")
      ->check(CLI::IsMember({"gb", "stein", "mle"}));
  phi_cmd->add_option("--p", p, "Dimension (gb family)");
  phi_cmd->add_option("--c1", c1, "Stein-form plateau");
  phi_cmd->add_option("--c2", c2, "Stein-form shift");
  phi_cmd->add_option("--z", z_points, "Evaluation points z >= 0")
      ->delimiter(',')
      ->required();

  std::vector<double> x_coords;
  CLI::App* estimate = app.add_subcommand("estimate", "Apply one rule to one observation");
  estimate->add_option("--estimator", estimator_name, "GB, JS, or MLE");
  estimate->add_option("--p", p, "Dimension");
  estimate->add_option("--a", a, "Spectrum decay rate");
  estimate->add_option("--x", x_coords, "Observation coordinates")
      ->delimiter(',')
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    OutputTarget target;
    target.open(out_path);
    std::ostream& out = *target.stream;

    if (table1->parsed() || table2->parsed() || check->parsed()) {
      shrink::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = shrink::parse_config_file(config_path);
      CLI::App* sub = table1->parsed() ? table1 : table2->parsed() ? table2 : check;
      auto passed = [sub](const std::string& name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
      };
      if (passed("--p")) cfg.p = p;
      if (passed("--a-list")) cfg.a_list = a_list;
      if (passed("--estimators")) cfg.estimators = estimators;
      if (passed("--m-grid")) cfg.m_grid = m_grid;
      if (passed("--tau-grid")) cfg.tau_grid = tau_grid;
      if (passed("--n-mc")) cfg.n_mc = n_mc;
      if (passed("--n-sure")) cfg.n_sure = n_sure;
      if (passed("--engine")) cfg.engine = engine;
      if (app.count("--seed")) cfg.seed = seed;
      if (app.count("--output")) cfg.output = output_format;
      cfg.validate();

      if (check->parsed()) {
        const auto rows = shrink::run_check_suite(cfg);
        cfg.output == "md" ? shrink::write_check_markdown(rows, out)
                           : shrink::write_check_csv(rows, out);
      } else {
        const auto cells = table1->parsed() ? shrink::run_table1(cfg, threads)
                                            : shrink::run_table2(cfg, threads);
        cfg.output == "md" ? shrink::write_table_markdown(cells, out)
                           : shrink::write_table_csv(cells, out);
      }
      return 0;
    }

    if (risk->parsed() || bayes->parsed()) {
      const shrink::CovarianceSpec cov = shrink::make_geometric_covariance(p, a);
      const shrink::ShrinkageRule rule = shrink::make_named_rule(estimator_name, cov);
      shrink::RiskEstimate est;
      if (risk->parsed()) {
        const shrink::MeanVector theta = shrink::theta_on_diagonal(m, cov);
        est = risk_engine == "sure"
                  ? shrink::mc_ordinary_risk_sure(rule, theta, n_scalar, seed, threads)
                  : shrink::mc_ordinary_risk(rule, theta, n_scalar, seed, threads);
        print_scalar_result(out, estimator_name, p, a, "m", m, est, cov.trace());
      } else {
        est = bayes_engine == "direct"
                  ? shrink::bayes_risk_direct(rule, tau, n_scalar, seed, threads)
              : bayes_engine == "dirichlet"
                  ? shrink::bayes_risk_dirichlet_oracle(rule, tau, n_scalar, seed, threads)
                  : shrink::bayes_risk_rb(rule, tau, n_scalar, seed, threads);
        print_scalar_result(out, estimator_name, p, a, "tau", tau, est, cov.trace());
      }
      return 0;
    }

    if (phi_cmd->parsed()) {
      shrink::PhiSpec spec = family == "mle"     ? shrink::make_mle()
                             : family == "stein" ? shrink::make_stein_form(c1, c2)
                                                 : shrink::make_generalized_bayes(p);
      out << "z,phi,dphi,phi_over_z\n";
      for (double z : z_points) {
        const shrink::PhiValue v = shrink::phi_value(spec, z);
        const double ratio = z > 0.0 ? v.value / z : shrink::phi_over_z_limit(spec);
        out << fmt6(z) << ',' << fmt6(v.value) << ',' << fmt6(v.derivative) << ','
            << fmt6(ratio) << '\n';
      }
      return 0;
    }

    if (estimate->parsed()) {
      const shrink::CovarianceSpec cov = shrink::make_geometric_covariance(
          static_cast<int>(x_coords.size()), a);
      const shrink::ShrinkageRule rule = shrink::make_named_rule(estimator_name, cov);
      Eigen::ArrayXd x(static_cast<Eigen::Index>(x_coords.size()));
      for (size_t i = 0; i < x_coords.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = x_coords[i];
      }
      const shrink::EstimateResult res = shrink::apply(rule, x);
      out << "z: " << fmt6(res.z) << "\n";
      if (res.singular_origin) out << "note: origin limit applied\n";
      out << "i,x,factor,delta\n";
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        out << i + 1 << ',' << fmt6(x[i]) << ',' << fmt6(res.factors[i]) << ','
            << fmt6(res.delta[i]) << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
