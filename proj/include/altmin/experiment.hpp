#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "altmin/core.hpp"
#include "altmin/objectives.hpp"
#include "altmin/optimizer.hpp"
#include "altmin/spectral.hpp"
#include "altmin/svg.hpp"
#include "altmin/verification.hpp"

namespace altmin {

/// Declarative description of a test problem. Matrix entries come inline,
/// from a CSV of rows, or from the seeded random recipe.
struct ProblemSpec {
  std::string kind;  // quadratic | quartic | matfac
  Matrix a;          // quadratic/quartic (inline or random recipe)
  std::string a_csv;  // alternative: CSV of matrix rows, config-relative
  double tau = 0.0;  // quartic domain bound
  int split = 0;     // 0 = midpoint
  double quadratic_rho = 0.0;  // declared rho for the quadratic (>= 0 valid)
  Matrix z;          // matfac data
  std::string z_csv;
  int rank = 0;  // matfac inner rank
};

struct ConstantsSpec {
  std::string mode;  // derived | manual
  // derived inputs (epsilon also used by manual configs for reporting)
  std::optional<double> epsilon, delta, delta_f, c;
  std::optional<double> l, l_max, rho;  // overrides of the problem constants
  // manual constants
  std::optional<double> eta, nu, r, g_th, f_th;
  std::optional<std::int64_t> t_th;
};

struct OutputSpec {
  std::string dir = "out";
  bool plots = true;
  bool log_x = false;
  ContourSettings contour;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemSpec problem;
  std::vector<Method> methods;
  ConstantsSpec constants;
  std::vector<std::uint64_t> seeds;
  std::int64_t budget = -1;          // -1: derived/default
  bool budget_is_override = false;   // set by the CLI --budget flag
  std::vector<double> init_center;  // empty = origin
  double init_radius = 0.0;
  int threads = 1;
  OutputSpec output;

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_text(const std::string& text);
};

struct BuiltProblem {
  std::shared_ptr<Objective> objective;
  BlockPartition partition{2, 1};
  std::optional<SmoothnessConstants> constants;
};

BuiltProblem build_problem(const ProblemSpec& spec,
                           const std::filesystem::path& base_dir = ".");

/// Resolves the run constants for one method: derives them per the
/// algorithm input line or validates the manual five-tuple.
RunConstants resolve_constants(const ExperimentConfig& cfg, const BuiltProblem& prob,
                               Method method);

/// Default iteration budget: ten times the theoretical iteration count at
/// the configured constants, capped at 1e7 (manual mode: 1e6).
std::int64_t resolve_budget(const ExperimentConfig& cfg, const BuiltProblem& prob,
                            Method method);

struct SeedRun {
  std::uint64_t seed = 0;
  RunResult run;
  InequalityLedger descent;
  InequalityLedger grad_ratio;
  double returned_grad_norm = 0.0;
  std::optional<double> returned_min_hess_eig;
};

struct MethodResult {
  Method method = Method::agd;
  RunConstants constants;
  std::vector<SeedRun> seeds;
};

struct ExperimentResult {
  ExperimentConfig config;
  BuiltProblem problem;
  std::vector<MethodResult> methods;
};

/// Runs every (method, seed) pair. Multi-seed batches fan out over
/// `threads` workers and are joined in seed order, so results do not
/// depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& base_dir = ".");

/// Writes trace.csv files, report.json and the SVG plots for a finished
/// experiment. Returns the paths written.
std::vector<std::filesystem::path> write_artifacts(const ExperimentResult& result,
                                                   const std::filesystem::path& out_dir);

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

struct LoadedTrace {
  std::string label;
  Trace trace;
};
LoadedTrace read_trace_csv(const std::filesystem::path& path);

std::string report_json(const ExperimentResult& result);

}  // namespace altmin
