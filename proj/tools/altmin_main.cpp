// Command-line experiment runner: executes declarative configs, replots
// stored traces and runs the verification suites.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "altmin/experiment.hpp"
#include "altmin/spectral.hpp"

namespace fs = std::filesystem;
using namespace altmin;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::int64_t seed_override, std::int64_t budget_override) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
  if (budget_override > 0) {
    cfg.budget = budget_override;
    cfg.budget_is_override = true;
  }
  const fs::path base = fs::path(config_path).parent_path();
  ExperimentResult result = run_experiment(cfg, base);
  const fs::path out_dir = out_override.empty() ? fs::path(cfg.output.dir) : fs::path(out_override);
  const auto written = write_artifacts(result, out_dir);
  for (const auto& p : written) std::cout << p.string() << "\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out_file, bool log_x) {
  std::vector<PlotSeries> series;
  for (const auto& path : traces) {
    LoadedTrace lt = read_trace_csv(path);
    if (lt.trace.rows.empty()) throw ConfigError("plot: empty trace " + path);
    PlotSeries s;
    s.label = lt.label;
    for (const auto& row : lt.trace.rows) {
      s.x.push_back(static_cast<double>(row.t));
      s.y.push_back(row.f);
      if (row.perturbed) s.mark_at.push_back(s.x.size() - 1);
    }
    series.push_back(std::move(s));
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw ConfigError("plot: cannot open " + out_file);
  out << render_line_plot(series, "iteration", "objective", log_x);
  std::cout << out_file << "\n";
  return 0;
}

int cmd_verify(const std::string& config_path) {
  ExperimentConfig cfg = ExperimentConfig::from_json_file(config_path);
  cfg.output.plots = false;
  const fs::path base = fs::path(config_path).parent_path();
  ExperimentResult result = run_experiment(cfg, base);

  int failures = 0;
  for (const auto& mr : result.methods) {
    for (const auto& sr : mr.seeds) {
      const bool ok = sr.descent.clean() && sr.grad_ratio.clean();
      if (!ok) ++failures;
      std::cout << (ok ? "PASS" : "FAIL") << " ledgers " << method_name(mr.method) << " seed "
                << sr.seed << " (descent worst slack " << sr.descent.worst_slack
                << ", grad-ratio worst slack " << sr.grad_ratio.worst_slack << ")\n";
    }
  }

  // Eigenvalue lemma checks at the initial center when it is a strict
  // saddle of a problem with an analytic Hessian.
  const auto& prob = result.problem;
  if (prob.objective->has_hessian() && prob.constants) {
    Vector center = Vector::Zero(prob.partition.dim);
    if (!cfg.init_center.empty())
      center = Eigen::Map<const Vector>(cfg.init_center.data(), prob.partition.dim);
    const Matrix h = prob.objective->hessian(center);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-9) {
      const double l_max = prob.constants->l_max();
      const double gamma = std::min(-lmin, l_max);
      const double eta = 0.9 / l_max;
      const SpectralReport lemma =
          verify_escape_lemma(h, prob.partition, eta, gamma, prob.constants->l, l_max);
      std::cout << (lemma.pass ? "PASS" : "FAIL") << " escape-lemma lambda_max(M^-1 T) = "
                << lemma.lambda_max_mt << " > " << lemma.lemma_bound << "\n";
      const SpectralReport coro = verify_prox_corollary(h, prob.partition, eta, gamma);
      std::cout << (coro.pass ? "PASS" : (coro.indeterminate ? "INDETERMINATE" : "FAIL"))
                << " prox-corollary lambda_min+(T'^-1 M') = " << coro.lambda_min_pos_tm
                << " <= " << coro.corollary_bound << "\n";
      if (!lemma.pass || !coro.pass) ++failures;
      std::cout << spectral_report_json(lemma) << "\n";
    } else {
      std::cout << "SKIP spectral checks: init center is not a strict saddle (lambda_min = "
                << lmin << ")\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-alternating saddle-escape toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, out_file;
  std::vector<std::string> traces;
  std::int64_t seed_override = -1, budget_override = -1;
  bool log_x = false;

  auto* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("config", config_path, "JSON config path")->required();
  run->add_option("--out", out_override, "Output directory override");
  run->add_option("--seed", seed_override, "Run a single seed");
  run->add_option("--budget", budget_override, "Iteration budget override");

  auto* plot = app.add_subcommand("plot", "Plot stored trace CSVs");
  plot->add_option("traces", traces, "trace.csv files")->required()->expected(-1);
  plot->add_option("--out", out_file, "Output SVG path")->required();
  plot->add_flag("--logx", log_x, "Logarithmic iteration axis");

  auto* verify = app.add_subcommand("verify", "Run spectral and ledger suites for a config");
  verify->add_option("config", config_path, "JSON config path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_override, seed_override, budget_override);
    if (plot->parsed()) return cmd_plot(traces, out_file, log_x);
    if (verify->parsed()) return cmd_verify(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
