#include "altmin/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace altmin {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("matrix: expected array of rows");
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(rows[0].size());
  Matrix m(nr, nc);
  for (int i = 0; i < nr; ++i) {
    if (static_cast<int>(rows[i].size()) != nc) throw ConfigError("matrix: ragged rows");
    for (int j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

Matrix matrix_from_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("matrix csv: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix csv: empty file " + path.string());
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("matrix csv: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

static RunConstants manual_constants(const ConstantsSpec& cs, Method method);

ExperimentConfig ExperimentConfig::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.name = j.value("name", "experiment");

  if (!j.contains("problem")) throw ConfigError("config: missing field 'problem'");
  const json& jp = j["problem"];
  cfg.problem.kind = jp.value("kind", "");
  if (cfg.problem.kind != "quadratic" && cfg.problem.kind != "quartic" &&
      cfg.problem.kind != "matfac")
    throw ConfigError("config: problem.kind must be quadratic|quartic|matfac");
  if (jp.contains("matrix")) cfg.problem.a = matrix_from_json(jp["matrix"]);
  if (jp.contains("matrix_csv")) cfg.problem.a_csv = jp["matrix_csv"].get<std::string>();
  if (jp.contains("random_matrix")) {
    const json& jr = jp["random_matrix"];
    if (!jr.contains("dim") || !jr.contains("seed"))
      throw ConfigError("config: problem.random_matrix needs dim and seed");
    RngStream rng(jr["seed"].get<std::uint64_t>());
    cfg.problem.a = random_saddle_matrix(rng, jr["dim"].get<int>());
  }
  cfg.problem.tau = jp.value("tau", 0.0);
  cfg.problem.split = jp.value("split_index", 0);
  cfg.problem.quadratic_rho = jp.value("declared_rho", 0.0);
  if (jp.contains("data")) cfg.problem.z = matrix_from_json(jp["data"]);
  if (jp.contains("data_csv")) cfg.problem.z_csv = jp["data_csv"].get<std::string>();
  cfg.problem.rank = jp.value("rank", 0);

  if (j.contains("method"))
    cfg.methods.push_back(method_from_name(j["method"].get<std::string>()));
  if (j.contains("methods"))
    for (const auto& m : j["methods"]) cfg.methods.push_back(method_from_name(m.get<std::string>()));
  if (cfg.methods.empty()) throw ConfigError("config: no method(s) given");

  if (!j.contains("constants")) throw ConfigError("config: missing field 'constants'");
  const json& jc = j["constants"];
  cfg.constants.mode = jc.value("mode", "");
  if (cfg.constants.mode != "derived" && cfg.constants.mode != "manual")
    throw ConfigError("config: constants.mode must be derived|manual");
  auto opt = [&](const char* key) -> std::optional<double> {
    if (jc.contains(key)) return jc[key].get<double>();
    return std::nullopt;
  };
  cfg.constants.epsilon = opt("epsilon");
  cfg.constants.delta = opt("delta");
  cfg.constants.delta_f = opt("delta_f");
  cfg.constants.c = opt("c");
  cfg.constants.l = opt("L");
  cfg.constants.l_max = opt("L_max");
  cfg.constants.rho = opt("rho");
  cfg.constants.eta = opt("eta");
  cfg.constants.nu = opt("nu");
  cfg.constants.r = opt("r");
  cfg.constants.g_th = opt("g_th");
  cfg.constants.f_th = opt("f_th");
  if (jc.contains("t_th")) cfg.constants.t_th = jc["t_th"].get<std::int64_t>();

  if (j.contains("seeds")) {
    const json& js = j["seeds"];
    if (js.is_array()) {
      for (const auto& s : js) cfg.seeds.push_back(s.get<std::uint64_t>());
    } else {
      const std::uint64_t base = js.value("base", 1);
      const int count = js.value("count", 1);
      for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
    }
  }
  if (cfg.seeds.empty()) cfg.seeds.push_back(1);

  cfg.budget = j.value("budget", static_cast<std::int64_t>(-1));
  if (j.contains("init")) {
    const json& ji = j["init"];
    if (ji.contains("center"))
      for (const auto& v : ji["center"]) cfg.init_center.push_back(v.get<double>());
    cfg.init_radius = ji.value("radius", 0.0);
  }
  cfg.threads = j.value("threads", 1);
  // manual-mode completeness is a config invariant; fail at load time
  if (cfg.constants.mode == "manual")
    for (Method m : cfg.methods) manual_constants(cfg.constants, m);
  if (j.contains("output")) {
    const json& jo = j["output"];
    cfg.output.dir = jo.value("dir", "out");
    cfg.output.plots = jo.value("plots", true);
    cfg.output.log_x = jo.value("log_x", false);
    cfg.output.contour.box = jo.value("contour_box", 2.5);
    cfg.output.contour.grid = jo.value("contour_grid", 201);
    cfg.output.contour.levels = jo.value("contour_levels", 12);
  }
  return cfg;
}

BuiltProblem build_problem(const ProblemSpec& spec, const fs::path& base_dir) {
  auto resolve = [&](const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p : base_dir / p;
  };
  BuiltProblem out;
  if (spec.kind == "quadratic" || spec.kind == "quartic") {
    Matrix a = spec.a;
    if (!spec.a_csv.empty()) a = matrix_from_csv(resolve(spec.a_csv));
    if (a.size() == 0) throw ConfigError("problem: matrix required");
    const int d = static_cast<int>(a.rows());
    const int split = spec.split > 0 ? spec.split : d / 2;
    out.partition = BlockPartition(d, split);
    if (spec.kind == "quadratic") {
      auto obj = std::make_shared<QuadraticForm>(a, out.partition, spec.quadratic_rho);
      out.constants = obj->constants();
      out.objective = std::move(obj);
    } else {
      if (!(spec.tau > 0.0)) throw ConfigError("problem: quartic needs tau > 0");
      auto obj = std::make_shared<QuarticSaddle>(a, spec.tau, out.partition);
      out.constants = obj->constants();
      out.objective = std::move(obj);
    }
  } else if (spec.kind == "matfac") {
    Matrix z = spec.z;
    if (!spec.z_csv.empty()) z = matrix_from_csv(resolve(spec.z_csv));
    if (z.size() == 0 || spec.rank < 1)
      throw ConfigError("problem: matfac needs data and rank");
    auto obj = std::make_shared<MatrixFactorization>(z, spec.rank);
    out.partition = obj->natural_partition();
    out.objective = std::move(obj);
  } else {
    throw ConfigError("problem: unknown kind '" + spec.kind + "'");
  }
  return out;
}

static RunInputs gather_inputs(const ExperimentConfig& cfg, const BuiltProblem& prob) {
  RunInputs in;
  const auto& cs = cfg.constants;
  if (prob.constants) {
    in.l = prob.constants->l;
    in.l_max = prob.constants->l_max();
    in.rho = prob.constants->rho;
  }
  if (cs.l) in.l = *cs.l;
  if (cs.l_max) in.l_max = *cs.l_max;
  if (cs.rho) in.rho = *cs.rho;
  in.epsilon = cs.epsilon.value_or(0.0);
  in.delta = cs.delta.value_or(0.0);
  in.delta_f = cs.delta_f.value_or(0.0);
  in.c = cs.c.value_or(0.0);
  return in;
}

static RunConstants manual_constants(const ConstantsSpec& cs, Method method) {
  RunConstants rc;
  rc.variant = method_is_proximal(method) ? Variant::papp : Variant::pagd;
  if (method_is_proximal(method)) {
    if (!cs.nu) throw ConfigError("constants: manual proximal mode requires nu");
    rc.nu = *cs.nu;
    rc.eta = 1.0 / rc.nu;
  } else {
    if (!cs.eta) throw ConfigError("constants: manual mode requires eta");
    rc.eta = *cs.eta;
  }
  if (method_is_perturbed(method)) {
    if (!cs.r || !cs.g_th || !cs.f_th || !cs.t_th)
      throw ConfigError("constants: manual mode requires all of r, g_th, f_th, t_th");
    rc.r = *cs.r;
    rc.g_th = *cs.g_th;
    rc.f_th = *cs.f_th;
    rc.t_th = *cs.t_th;
  }
  return rc;
}

RunConstants resolve_constants(const ExperimentConfig& cfg, const BuiltProblem& prob,
                               Method method) {
  const auto& cs = cfg.constants;
  if (cs.mode == "derived") {
    const Variant variant = method_is_proximal(method) ? Variant::papp : Variant::pagd;
    const RunInputs in = gather_inputs(cfg, prob);
    return RunConstants::from_derived(derive_constants(in, prob.partition.dim, variant));
  }
  return manual_constants(cs, method);
}

std::int64_t resolve_budget(const ExperimentConfig& cfg, const BuiltProblem& prob,
                            Method method) {
  if (cfg.budget > 0) return cfg.budget;
  if (cfg.constants.mode == "derived") {
    const Variant variant = method_is_proximal(method) ? Variant::papp : Variant::pagd;
    const RunInputs in = gather_inputs(cfg, prob);
    const DerivedConstants d = derive_constants(in, prob.partition.dim, variant);
    const double capped = std::min(10.0 * d.theoretical_iterations, 1e7);
    return static_cast<std::int64_t>(std::max(1.0, capped));
  }
  return 1000000;
}

namespace {

// Deterministic fan-out: results land in a preallocated slot per index, so
// the join order never depends on scheduling.
void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& base_dir) {
  ExperimentResult result;
  result.config = cfg;
  result.problem = build_problem(cfg.problem, base_dir);
  const auto& prob = result.problem;
  const int d = prob.partition.dim;

  Vector center = Vector::Zero(d);
  if (!cfg.init_center.empty()) {
    if (static_cast<int>(cfg.init_center.size()) != d)
      throw ConfigError("init.center dimension mismatch");
    center = Eigen::Map<const Vector>(cfg.init_center.data(), d);
  }

  for (Method method : cfg.methods) {
    MethodResult mr;
    mr.method = method;
    mr.constants = resolve_constants(cfg, prob, method);
    RunControls ctl;
    ctl.budget = resolve_budget(cfg, prob, method);
    ctl.budget_is_user_override = cfg.budget_is_override;
    ctl.record_path = cfg.output.plots && d == 2;
    mr.seeds.resize(cfg.seeds.size());

    parallel_for_indexed(static_cast<int>(cfg.seeds.size()), cfg.threads, [&](int i) {
      const std::uint64_t seed = cfg.seeds[i];
      RngStream rng(seed);
      Vector x0 = center;
      if (cfg.init_radius > 0.0) x0 += sample_uniform_ball(rng, d, cfg.init_radius);
      SeedRun sr;
      sr.seed = seed;
      sr.run = run_optimizer(*prob.objective, prob.partition, x0, method, mr.constants, ctl, rng);
      sr.descent = check_descent(sr.run.trace, mr.constants);
      sr.grad_ratio = check_grad_ratio(sr.run.trace);
      sr.returned_grad_norm = prob.objective->gradient(sr.run.result).norm();
      if (prob.objective->has_hessian()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(prob.objective->hessian(sr.run.result));
        sr.returned_min_hess_eig = es.eigenvalues().minCoeff();
      }
      mr.seeds[i] = std::move(sr);
    });
    result.methods.push_back(std::move(mr));
  }
  return result;
}

void write_trace_csv(const fs::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_trace_csv: cannot open " + path.string());
  out << "t,f,sum_block_grad_sq,full_grad_norm,perturbed,returned\n";
  for (const auto& row : trace.rows) {
    out << row.t << ',' << fmt(row.f) << ',' << fmt(row.sum_block_grad_sq) << ','
        << fmt(row.full_grad_norm) << ',' << (row.perturbed ? 1 : 0) << ','
        << (row.returned ? 1 : 0) << '\n';
  }
}

LoadedTrace read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("read_trace_csv: cannot open " + path.string());
  LoadedTrace lt;
  lt.label = path.stem().string();
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,f,", 0) != 0)
    throw ConfigError("read_trace_csv: bad header in " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow row;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    row.t = std::stoll(cell);
    std::getline(ss, cell, ',');
    row.f = std::stod(cell);
    std::getline(ss, cell, ',');
    row.sum_block_grad_sq = std::stod(cell);
    std::getline(ss, cell, ',');
    row.full_grad_norm = std::stod(cell);
    std::getline(ss, cell, ',');
    row.perturbed = cell == "1";
    std::getline(ss, cell, ',');
    row.returned = cell == "1";
    lt.trace.rows.push_back(row);
  }
  return lt;
}

std::string report_json(const ExperimentResult& result) {
  json j;
  j["name"] = result.config.name;
  j["problem"] = result.config.problem.kind;
  j["dim"] = result.problem.partition.dim;

  const auto& cs = result.config.constants;
  const bool have_ss2_target = result.problem.objective->has_hessian() && cs.epsilon &&
                               result.problem.constants &&
                               result.problem.constants->rho > 0.0;
  double gamma_target = 0.0;
  if (have_ss2_target) {
    const double lm = cs.l_max.value_or(result.problem.constants->l_max());
    const double rho = cs.rho.value_or(result.problem.constants->rho);
    gamma_target = std::cbrt(lm * rho * *cs.epsilon);
  }

  if (cs.mode == "derived") {
    const RunInputs in = gather_inputs(result.config, result.problem);
    const ProofScales ps = proof_scales(in, result.problem.partition.dim);
    j["proof_scales"] = {{"gamma", ps.gamma},     {"kappa", ps.kappa},
                         {"f_scale", ps.f_scale}, {"g_scale", ps.g_scale},
                         {"s_scale", ps.s_scale}, {"t_scale", ps.t_scale}};
  }

  json methods = json::array();
  for (const auto& mr : result.methods) {
    json jm;
    jm["method"] = method_name(mr.method);
    jm["constants"] = {{"eta", mr.constants.eta},      {"nu", mr.constants.nu},
                       {"r", mr.constants.r},          {"g_th", mr.constants.g_th},
                       {"f_th", mr.constants.f_th},    {"t_th", mr.constants.t_th}};
    json seeds = json::array();
    bool all_ledgers_clean = true;
    for (const auto& sr : mr.seeds) {
      json js;
      js["seed"] = sr.seed;
      js["termination"] = termination_name(sr.run.trace.termination);
      js["iterations"] = sr.run.iterations;
      js["returned_f"] = sr.run.result_f;
      js["final_grad_norm"] = sr.returned_grad_norm;
      if (sr.returned_min_hess_eig) js["min_hessian_eig"] = *sr.returned_min_hess_eig;
      js["perturbations"] = sr.run.trace.events.size();
      js["max_norm_sq"] = sr.run.max_norm_sq;
      js["ledgers"] = {
          {"descent", {{"violations", sr.descent.violations}, {"worst_slack", sr.descent.worst_slack}}},
          {"grad_ratio",
           {{"violations", sr.grad_ratio.violations}, {"worst_slack", sr.grad_ratio.worst_slack}}}};
      if (method_is_perturbed(mr.method)) {
        json ss2;
        ss2["grad_bound"] = 2.0 * mr.constants.g_th;
        ss2["grad_ok"] = sr.returned_grad_norm <= 2.0 * mr.constants.g_th;
        if (have_ss2_target && sr.returned_min_hess_eig) {
          ss2["min_eig_bound"] = -gamma_target;
          ss2["hess_ok"] = *sr.returned_min_hess_eig >= -gamma_target;
        }
        ss2["applicable"] = sr.run.trace.termination == Termination::returned_ss2;
        js["ss2"] = ss2;
      }
      all_ledgers_clean = all_ledgers_clean && sr.descent.clean() && sr.grad_ratio.clean();
      seeds.push_back(std::move(js));
    }
    jm["seeds"] = std::move(seeds);
    jm["all_ledgers_clean"] = all_ledgers_clean;
    methods.push_back(std::move(jm));
  }
  j["methods"] = std::move(methods);
  return j.dump(2) + "\n";
}

std::vector<fs::path> write_artifacts(const ExperimentResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  const auto& cfg = result.config;

  for (const auto& mr : result.methods) {
    for (const auto& sr : mr.seeds) {
      const std::string stem =
          cfg.name + "_" + method_name(mr.method) + "_seed" + std::to_string(sr.seed);
      const fs::path tpath = out_dir / (stem + ".trace.csv");
      write_trace_csv(tpath, sr.run.trace);
      written.push_back(tpath);
      if (!sr.run.path.empty()) {
        const fs::path xy = out_dir / (stem + ".trajectory.csv");
        std::ofstream out(xy, std::ios::binary);
        out << "t,x1,x2\n";
        for (std::size_t i = 0; i < sr.run.path.size(); ++i)
          out << i << ',' << fmt(sr.run.path[i][0]) << ',' << fmt(sr.run.path[i][1]) << '\n';
        written.push_back(xy);
      }
    }
  }

  const fs::path rpath = out_dir / (cfg.name + "_report.json");
  {
    std::ofstream out(rpath, std::ios::binary);
    out << report_json(result);
  }
  written.push_back(rpath);

  if (cfg.output.plots && !result.methods.empty()) {
    std::vector<PlotSeries> series;
    for (const auto& mr : result.methods) {
      if (mr.seeds.empty()) continue;
      const auto& trace = mr.seeds.front().run.trace;
      PlotSeries s;
      s.label = method_name(mr.method);
      s.x.reserve(trace.rows.size());
      s.y.reserve(trace.rows.size());
      for (const auto& row : trace.rows) {
        s.x.push_back(static_cast<double>(row.t));
        s.y.push_back(row.f);
        if (row.perturbed) s.mark_at.push_back(s.x.size() - 1);
      }
      series.push_back(std::move(s));
    }
    const fs::path opath = out_dir / (cfg.name + "_objective.svg");
    {
      std::ofstream out(opath, std::ios::binary);
      out << render_line_plot(series, "iteration", "objective", cfg.output.log_x);
    }
    written.push_back(opath);

    if (result.problem.partition.dim == 2) {
      const auto& obj = *result.problem.objective;
      auto field = [&obj](double x, double y) {
        Vector v(2);
        v << x, y;
        return obj.value(v);
      };
      for (const auto& mr : result.methods) {
        if (mr.seeds.empty() || mr.seeds.front().run.path.empty()) continue;
        const auto& sr = mr.seeds.front();
        std::vector<std::size_t> marks;
        for (std::size_t i = 0; i < sr.run.trace.rows.size(); ++i)
          if (sr.run.trace.rows[i].perturbed) marks.push_back(i);
        const fs::path cpath =
            out_dir / (cfg.name + "_" + method_name(mr.method) + "_trajectory.svg");
        std::ofstream out(cpath, std::ios::binary);
        out << render_contour_plot(field, cfg.output.contour, sr.run.path, marks);
        written.push_back(cpath);
      }
    }
  }
  return written;
}

}  // namespace altmin
