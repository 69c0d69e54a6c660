#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "proxkit/bench.hpp"
#include "proxkit/catalyst.hpp"
#include "proxkit/errors.hpp"
#include "proxkit/instance_io.hpp"
#include "proxkit/moreau.hpp"
#include "proxkit/pgsg.hpp"
#include "proxkit/problems.hpp"
#include "proxkit/proxlinear.hpp"
#include "proxkit/text.hpp"

namespace proxkit::bench {

bool BundleResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.ok; });
}

namespace {

std::size_t size_param(const Choice& c, const std::string& key) {
  return static_cast<std::size_t>(c.integer(key));
}

SyntheticInstance make_instance(const Choice& p, std::uint64_t seed) {
  if (p.name == "phase_retrieval")
    return make_phase_retrieval(size_param(p, "d"), size_param(p, "m"), p.real("outlier_frac"), seed);
  if (p.name == "robust_pca")
    return make_robust_pca(size_param(p, "rows"), size_param(p, "cols"), size_param(p, "rank"), p.real("sparsity"),
                           seed);
  if (p.name == "z2_sync") return make_z2_sync(size_param(p, "d"), p.real("edge_prob"), p.real("flip_prob"), seed);
  if (p.name == "box_nls") return make_box_nls(size_param(p, "d"), size_param(p, "m"), seed);
  if (p.name == "lasso") return make_lasso(size_param(p, "d"), size_param(p, "m"), p.real("lambda"), seed);
  if (p.name == "erm_logistic") return make_erm_logistic(size_param(p, "d"), size_param(p, "m"), p.real("mu"), seed);
  if (p.name == "ridge") return make_ridge(size_param(p, "d"), size_param(p, "m"), p.real("condition"), seed);
  throw std::invalid_argument("unknown problem '" + p.name + "'");
}

std::size_t instance_dim(const SyntheticInstance& inst) {
  if (inst.composite) return inst.composite->dim();
  if (inst.finite_sum) return inst.finite_sum->dim();
  return inst.stochastic->dim();
}

Vector initial_point(const ExperimentConfig& config, const SyntheticInstance& inst, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(instance_dim(inst));
  RandomStream rng(seed, 2);
  if (config.init_kind == "zero") return Vector::Zero(d);
  Vector u(d);
  for (auto& e : u) e = rng.normal();
  if (config.init_kind == "gaussian") return config.init_scale * u;
  // near_truth: a point at relative distance init_scale from the reference.
  const Vector ref = inst.data.has_array("x_star") ? inst.data.array("x_star").as_vector()
                                                    : inst.ground_truth.value_or(Vector::Zero(d));
  const double norm = u.norm();
  if (norm == 0.0) return ref;
  return ref + config.init_scale * std::max(ref.norm(), 1.0) * u / norm;
}

SolverReport dispatch(const Choice& s, const SyntheticInstance& inst, const Vector& x0, std::uint64_t seed) {
  RandomStream rng(seed, 1);
  if (s.name == "proxlinear") {
    ProxLinearOptions o;
    o.outer_iters = size_param(s, "iters");
    o.stat_tol = s.real("tol");
    o.inner_tol = s.real("inner_tol");
    o.beta = s.real("beta");
    return proxlinear_run(*inst.composite, x0, o);
  }
  if (s.name == "proxpoint") {
    const CompositeProblem& f = *inst.composite;
    const double nu = s.real("nu") > 0.0 ? s.real("nu") : 1.0 / (2.0 * f.weak_convexity());
    ProxOptions inner;
    inner.inner_tol = s.real("inner_tol");
    return proximal_point_run(f, nu, x0, size_param(s, "iters"), s.real("tol"), inner, 0);
  }
  if (s.name == "pgsg") {
    PgsgOptions o;
    o.outer_iters = size_param(s, "iters");
    o.record_every = size_param(s, "record_every");
    o.stat_inner_tol = s.real("stat_inner_tol");
    return pgsg_run(*inst.stochastic, x0, default_schedule(inst.stochastic->weak_convexity()), rng, o);
  }
  const FiniteSumProblem& problem = *inst.finite_sum;
  std::optional<double> f_star;
  if (s.boolean("use_fstar")) f_star = inst.optimum_value;
  if (s.name.starts_with("catalyst-")) {
    const std::string inner_name = s.name.substr(9);
    const auto inner = make_inner_method(inner_name);
    CatalystOptions o;
    o.kappa = s.params.at("kappa") == "auto" ? choose_kappa(problem, inner_name) : s.real("kappa");
    o.outer_iters = size_param(s, "iters");
    o.eps = s.real("eps");
    o.f_star = f_star;
    o.inner_budget = static_cast<std::uint64_t>(s.integer("inner_budget"));
    o.warm_start_prev = s.params.at("warm_start") == "prev";
    return catalyst_run(problem, *inner, x0, o, rng);
  }
  BaselineOptions o;
  o.max_iters = size_param(s, "iters");
  o.eps = s.real("eps");
  o.f_star = f_star;
  o.record_every = size_param(s, "record_every");
  if (s.name == "svrg") return svrg_baseline_run(problem, x0, o, rng);
  return gradient_descent_run(problem, x0, o);
}

struct Outcome {
  SolverReport report;
  InstanceData data;
};

Outcome run_with_instance(const ExperimentConfig& config, const Choice& solver, std::uint64_t seed) {
  SyntheticInstance inst = make_instance(config.problem, seed);
  const Vector x0 = initial_point(config, inst, seed);
  SolverReport report = dispatch(solver, inst, x0, seed);
  report.seed = seed;
  report.config_echo = inst.data.config;
  return {std::move(report), std::move(inst.data)};
}

std::string run_file(const std::string& arm, std::uint64_t seed) {
  return "run_" + arm + "_seed" + std::to_string(seed) + ".csv";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

SolverReport run_single(const ExperimentConfig& config, const Choice& solver, std::uint64_t seed) {
  return run_with_instance(config, solver, seed).report;
}

BundleResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  BundleResult bundle;
  bundle.out_dir = options.out_dir.value_or(config.output_dir);
  std::filesystem::create_directories(bundle.out_dir);

  struct Task {
    std::string arm;
    const Choice* solver;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s : config.seeds) {
    const std::int64_t shifted = static_cast<std::int64_t>(s) + options.seed_offset;
    if (shifted < 0) throw std::invalid_argument("seed offset makes seed " + std::to_string(s) + " negative");
    seeds.push_back(static_cast<std::uint64_t>(shifted));
  }
  for (std::uint64_t seed : seeds) tasks.push_back({"solver", &config.solver, seed});
  if (config.baseline)
    for (std::uint64_t seed : seeds) tasks.push_back({"baseline", &*config.baseline, seed});

  bundle.runs.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      RunRecord& rec = bundle.runs[k];
      rec.arm = task.arm;
      rec.seed = task.seed;
      rec.solver = task.solver->name;
      rec.file = run_file(task.arm, task.seed);
      try {
        Outcome outcome = run_with_instance(config, *task.solver, task.seed);
        if (config.save_instances && task.arm == "solver")
          save_instance(bundle.out_dir / ("instance_seed" + std::to_string(task.seed) + ".pxk"), outcome.data);
        rec.report = std::move(outcome.report);
        rec.ok = true;
      } catch (const BudgetExceeded& e) {
        rec.error = one_line(e.what());
        if (e.partial_report) rec.report = *e.partial_report;
      } catch (const std::exception& e) {
        rec.error = one_line(e.what());
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(tasks.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::string prefix = std::string(kCsvSchema) + " artifact=" + kArtifactVersion + " config_hash=" + config.hash;
  for (const RunRecord& rec : bundle.runs) {
    if (!rec.report) continue;
    std::ostringstream csv;
    write_run_csv(csv,
                  *rec.report,
                  prefix + " seed=" + std::to_string(rec.seed) + " arm=" + rec.arm + " solver=" + rec.solver +
                      " status=" + (rec.ok ? rec.report->status : "failed"),
                  config.wall_clock);
    write_text(bundle.out_dir / rec.file, csv.str());
  }

  std::ostringstream summary;
  std::string seed_list;
  for (std::size_t k = 0; k < seeds.size(); ++k) seed_list += (k ? ";" : "") + std::to_string(seeds[k]);
  summary << "# " << prefix << " seeds=" << seed_list << '\n' << summary_header();
  std::optional<SummaryRow> final_row[2];
  const char* arms[2] = {"solver", "baseline"};
  for (int a = 0; a < 2; ++a) {
    std::vector<const SolverReport*> reports;
    for (const RunRecord& rec : bundle.runs)
      if (rec.ok && rec.arm == arms[a]) reports.push_back(&*rec.report);
    if (reports.empty()) continue;
    const auto rows = summarize(reports);
    summary << summary_rows(rows, arms[a]);
    // Final-row medians over each run's own last row.
    std::vector<double> stat, obj, evals;
    for (const auto* r : reports) {
      stat.push_back(r->stationarity.back());
      obj.push_back(r->objective.back());
      evals.push_back(static_cast<double>(r->grad_evals.back()));
    }
    SummaryRow last;
    last.stationarity[1] = quantile(stat, 0.5);
    last.objective[1] = quantile(obj, 0.5);
    last.grad_evals_median = quantile(evals, 0.5);
    final_row[a] = last;
  }
  if (final_row[0] && final_row[1]) {
    const SummaryRow& s = *final_row[0];
    const SummaryRow& b = *final_row[1];
    summary << "ratio,," << format_double(b.stationarity[1] / s.stationarity[1]) << ",,,"
            << format_double(b.objective[1] / s.objective[1]) << ",,,"
            << format_double(b.grad_evals_median / s.grad_evals_median) << '\n';
  }
  write_text(bundle.out_dir / "summary.csv", summary.str());

  std::ostringstream manifest;
  manifest << "proxkit-manifest v1\n"
           << "artifact: " << kArtifactVersion << '\n'
           << "config_hash: " << config.hash << '\n'
           << "seed_offset: " << options.seed_offset << '\n';
  for (const RunRecord& rec : bundle.runs) {
    manifest << "run: arm=" << rec.arm << " seed=" << rec.seed << " solver=" << rec.solver
             << " file=" << (rec.report ? rec.file : "-");
    if (rec.ok)
      manifest << " status=ok:" << rec.report->status << '\n';
    else
      manifest << " status=failed error=\"" << rec.error << "\"\n";
  }
  manifest << "summary: summary.csv\n";
  write_text(bundle.out_dir / "MANIFEST", manifest.str());
  return bundle;
}

}  // namespace proxkit::bench
