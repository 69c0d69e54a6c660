#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "proxkit/bench.hpp"
#include "proxkit/catalyst.hpp"
#include "proxkit/functions.hpp"
#include "proxkit/moreau.hpp"
#include "proxkit/numerics.hpp"
#include "proxkit/pgsg.hpp"
#include "proxkit/problems.hpp"
#include "proxkit/proxlinear.hpp"

using namespace proxkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

Vector normal_vector(RandomStream& rng, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& e : v) e = rng.normal();
  return v;
}

double median(std::vector<double> v) { return bench::quantile(std::move(v), 0.5); }

// Runs fn(k) for k in [0, n) on a few threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) fn(k);
    });
  for (auto& t : pool) t.join();
}

Outcome moreau_gradient_identity() {
  const ProxOptions tight{1e-12, 200000};
  RandomStream rng(11, 2);
  double worst = 0.0;
  std::size_t checked = 0;

  auto audit = [&](auto envelope, double nu, std::size_t d, double scale) {
    for (int k = 0; k < 50; ++k) {
      const Vector z = scale * normal_vector(rng, d);
      const MoreauPoint mp = envelope(z);
      const Vector identity = (z - mp.prox_point) / nu;
      const Vector fd = finite_difference_gradient([&](const Vector& y) { return envelope(y).envelope_value; }, z);
      worst = std::max(worst, (identity - fd).norm() / (1.0 + identity.norm()));
      ++checked;
    }
  };

  const L1Norm abs_value(1.0, 1);
  audit([&](const Vector& z) { return prox_map(abs_value, 1.0, z); }, 1.0, 1, 2.0);

  const HalfSquaredNorm half_sq;
  audit([&](const Vector& z) { return prox_map(half_sq, 1.0, z); }, 1.0, 3, 2.0);

  const CompositeProblem kink = abs_square_minus_one();
  const double nu_kink = 1.0 / (2.0 * kink.weak_convexity() + 1.0);
  audit([&](const Vector& z) { return prox_map(kink, nu_kink, z, tight); }, nu_kink, 1, 1.5);

  const auto pr = make_phase_retrieval(5, 40, 0.1, 3);
  const double nu_pr = 1.0 / (2.0 * pr.composite->weak_convexity() + 1.0);
  audit([&](const Vector& z) { return prox_map(*pr.composite, nu_pr, z, tight); }, nu_pr, 5, 1.0);

  return {worst <= 1e-4, fmt("%zu points, worst relative deviation %.3g (limit 1e-4)", checked, worst)};
}

Outcome proxlinear_matches_ista() {
  const auto inst = make_lasso(50, 100, 0.1, 5);
  const Matrix a = inst.data.array("A").as_matrix();
  const Vector b = inst.data.array("b").as_vector();
  const double lambda = inst.data.constant("lambda");
  const double step = 1.0 / (inst.composite->L * inst.composite->beta);

  ProxLinearOptions options;
  options.outer_iters = 100;
  options.stat_tol = 0.0;
  options.inner_tol = 1e-14;
  options.iterate_stride = 1;
  const Vector x0 = Vector::Zero(50);
  const SolverReport report = proxlinear_run(*inst.composite, x0, options);

  Vector x = x0;
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t t = 0; t < report.iterates.size(); ++t) {
    worst = std::max(worst, (report.iterates[t] - x).lpNorm<Eigen::Infinity>());
    ++compared;
    const Vector v = x - step * (a.transpose() * (a * x - b));
    x = v.unaryExpr([&](double e) { return sign(e) * std::max(std::abs(e) - step * lambda, 0.0); });
  }
  worst = std::max(worst, (report.final_point - x).lpNorm<Eigen::Infinity>());
  const bool pass = compared == 100 && worst <= 1e-8;
  return {pass, fmt("%zu iterates compared, max l_inf deviation %.3g (limit 1e-8)", compared, worst)};
}

Outcome sandwich_bound() {
  struct Case {
    const char* name;
    SyntheticInstance inst;
    double scale;
  };
  std::vector<Case> cases;
  cases.push_back({"lasso", make_lasso(50, 100, 0.1, 7), 1.0});
  cases.push_back({"phase_retrieval", make_phase_retrieval(10, 80, 0.1, 7), 1.0});

  std::size_t violations = 0;
  double lo_ratio = INFINITY;
  double hi_ratio = 0.0;
  for (const auto& c : cases) {
    const CompositeProblem& problem = *c.inst.composite;
    const double beta = problem.L * problem.beta;
    RandomStream rng(7, 2);
    std::vector<Vector> points;
    for (int k = 0; k < 100; ++k) points.push_back(c.scale * normal_vector(rng, problem.dim()));
    std::vector<double> surrogate(points.size()), envelope(points.size());
    parallel_for(points.size(), [&](std::size_t k) {
      surrogate[k] = proxlinear_step(problem, points[k], beta, 1e-12, 2000000).surrogate.norm;
      envelope[k] = prox_map(problem, 1.0 / (2.0 * beta), points[k], {1e-9, 20000}).envelope_gradient.norm();
    });
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (0.25 * envelope[k] > surrogate[k] + 1e-6 || surrogate[k] > 3.0 * envelope[k] + 1e-6) ++violations;
      lo_ratio = std::min(lo_ratio, surrogate[k] / envelope[k]);
      hi_ratio = std::max(hi_ratio, surrogate[k] / envelope[k]);
    }
  }
  return {violations == 0,
          fmt("200 points, %zu violations, |G|/|grad F_nu| in [%.3f, %.3f]", violations, lo_ratio, hi_ratio)};
}

Outcome quadratic_local_convergence() {
  std::vector<int> good(20, 0);
  std::vector<double> dist(20);
  parallel_for(20, [&](std::size_t s) {
    const std::uint64_t seed = 100 + s;
    const auto inst = make_phase_retrieval(20, 160, 0.0, seed);
    const Vector& truth = *inst.ground_truth;
    RandomStream rng(seed, 2);
    const Vector u = normal_vector(rng, 20);
    const Vector x0 = truth + 0.1 * truth.norm() * u / u.norm();
    ProxLinearOptions options;
    options.outer_iters = 10;
    options.stat_tol = 1e-9;
    options.inner_tol = 1e-20;
    const SolverReport report = proxlinear_run(*inst.composite, x0, options);
    dist[s] = std::min((report.final_point - truth).norm(), (report.final_point + truth).norm());
    if (report.stationarity.size() < 4) return;
    const RateEstimate est = estimate_local_rate(report.stationarity);
    good[s] = dist[s] <= 1e-10 && est.kind == RateEstimate::Kind::quadratic;
  });
  const int ok = std::accumulate(good.begin(), good.end(), 0);
  return {ok >= 18, fmt("%d/20 seeds reach distance <= 1e-10 with a quadratic rate (need 18), worst distance %.3g", ok,
                        *std::max_element(dist.begin(), dist.end()))};
}

std::uint64_t catalyst_calls(const FiniteSumProblem& problem, const std::string& inner, const Vector& x0,
                             double f_star, bool warm_start_prev, std::uint64_t seed, std::string& status) {
  CatalystOptions options;
  options.kappa = choose_kappa(problem, inner);
  options.eps = 1e-6;
  options.f_star = f_star;
  options.warm_start_prev = warm_start_prev;
  RandomStream rng(seed, 1);
  const SolverReport report = catalyst_run(problem, *make_inner_method(inner), x0, options, rng);
  status = report.status;
  return report.counters.component_gradient;
}

Outcome catalyst_speedup() {
  const auto inst = make_ridge(50, 500, 1e4, 1);
  const FiniteSumProblem& problem = *inst.finite_sum;
  const Vector x0 = Vector::Zero(50);
  std::string s_extra, s_prev;
  const auto extrapolated = catalyst_calls(problem, "gd", x0, *inst.optimum_value, false, 1, s_extra);
  const auto prev = catalyst_calls(problem, "gd", x0, *inst.optimum_value, true, 1, s_prev);

  BaselineOptions bo;
  bo.eps = 1e-6;
  bo.f_star = inst.optimum_value;
  bo.record_every = 1000;
  const SolverReport gd = gradient_descent_run(problem, x0, bo);
  const double ratio = double(gd.counters.component_gradient) / double(extrapolated);
  const bool pass = ratio >= 5.0 && s_extra == "converged" && gd.status == "converged";
  return {pass, fmt("gd %llu vs catalyst-gd %llu gradients, ratio %.2f (need >= 5); warm start at x_{t-1}: ratio %.2f",
                    (unsigned long long)gd.counters.component_gradient, (unsigned long long)extrapolated, ratio,
                    double(gd.counters.component_gradient) / double(prev))};
}

Outcome erm_regime_boundary() {
  struct Regime {
    std::size_t m;
    double condition;
    std::vector<double> ratios = std::vector<double>(5);
    std::vector<double> ratios_prev = std::vector<double>(5);
  };
  std::vector<Regime> regimes = {{200, 1e4}, {5000, 50.0}};
  bool all_converged = true;
  for (auto& r : regimes) {
    parallel_for(5, [&](std::size_t s) {
      const std::uint64_t seed = s + 1;
      const auto inst = make_erm_logistic(20, r.m, 1.0 / (r.condition - 1.0), seed);
      const FiniteSumProblem& problem = *inst.finite_sum;
      const Vector x0 = Vector::Zero(20);
      std::string status, status_prev;
      const auto cat = catalyst_calls(problem, "svrg", x0, *inst.optimum_value, false, seed, status);
      const auto cat_prev = catalyst_calls(problem, "svrg", x0, *inst.optimum_value, true, seed, status_prev);
      BaselineOptions bo;
      bo.eps = 1e-6;
      bo.f_star = inst.optimum_value;
      RandomStream rng(seed, 1);
      const SolverReport svrg = svrg_baseline_run(problem, x0, bo, rng);
      if (status != "converged" || svrg.status != "converged") all_converged = false;
      r.ratios[s] = double(svrg.counters.component_gradient) / double(cat);
      r.ratios_prev[s] = double(svrg.counters.component_gradient) / double(cat_prev);
    });
  }
  const double small_m = median(regimes[0].ratios);
  const double large_m = median(regimes[1].ratios);
  const bool pass = all_converged && small_m >= 1.5 && large_m <= 1.1;
  return {pass, fmt("median svrg/catalyst-svrg ratio: m=200 %.2f (need >= 1.5), m=5000 %.3f (need <= 1.1); "
                    "warm start at x_{t-1}: %.2f, %.3f",
                    small_m, large_m, median(regimes[0].ratios_prev), median(regimes[1].ratios_prev))};
}

Outcome momentum_recurrence() {
  RandomStream rng(23, 2);
  double worst_quadratic = 0.0, worst_fixed = 0.0, worst_limit = 0.0;
  bool in_range = true;
  std::string slow;
  for (int k = 0; k < 100; ++k) {
    const double q = rng.uniform(1e-12, 1.0);
    const double alpha_prev = rng.uniform(1e-12, 1.0);
    const MomentumStep step = momentum_update(alpha_prev, q);
    const double residual = step.alpha * step.alpha - (1.0 - step.alpha) * alpha_prev * alpha_prev - q * step.alpha;
    worst_quadratic = std::max(worst_quadratic, std::abs(residual));
    in_range = in_range && step.alpha > 0.0 && step.alpha <= 1.0;

    const double root = std::sqrt(q);
    worst_fixed = std::max(worst_fixed, std::abs(momentum_update(root, q).alpha - root));

    const double alpha0 = rng.uniform(1e-12, 1.0);
    double alpha = alpha0;
    for (int t = 0; t < 200; ++t) alpha = momentum_update(alpha, q).alpha;
    worst_limit = std::max(worst_limit, std::abs(alpha - root));
    if (std::abs(alpha - root) > 1e-10) slow += fmt(" q=%.4g (alpha0 %.3g, off by %.3g)", q, alpha0, std::abs(alpha - root));
  }
  const bool pass = in_range && worst_quadratic <= 1e-12 && worst_fixed <= 1e-14 && worst_limit <= 1e-10;
  std::string detail = fmt("quadratic residual %.3g (1e-12), fixed point drift %.3g (1e-14), distance after 200 steps "
                           "%.3g (1e-10)",
                           worst_quadratic, worst_fixed, worst_limit);
  if (!slow.empty()) detail += "; not converged:" + slow;
  return {pass, detail};
}

Outcome pgsg_progress() {
  std::vector<SolverReport> reports(20);
  parallel_for(20, [&](std::size_t s) {
    const std::uint64_t seed = s + 1;
    const auto inst = make_phase_retrieval(10, 80, 0.1, seed);
    const StochasticProblem& problem = *inst.stochastic;
    RandomStream init(seed, 2), rng(seed, 1);
    const Vector x0 = normal_vector(init, 10);
    PgsgOptions options;
    options.outer_iters = 200;
    options.record_every = 20;
    reports[s] = pgsg_run(problem, x0, default_schedule(problem.weak_convexity()), rng, options);
  });

  auto median_at = [&](std::size_t t) -> double {
    std::vector<double> v;
    for (const auto& r : reports) {
      const auto it = std::find(r.iteration.begin(), r.iteration.end(), t);
      if (it == r.iteration.end()) return NAN;
      const double s = r.stationarity[static_cast<std::size_t>(it - r.iteration.begin())];
      v.push_back(s * s);
    }
    return median(v);
  };
  const double first = median_at(1);
  const double last = median_at(200);
  bool monotone = true;
  double prev = median_at(20);
  for (std::size_t t = 40; t <= 200; t += 20) {
    const double cur = median_at(t);
    monotone = monotone && cur <= 1.05 * prev;
    prev = cur;
  }
  const bool pass = last <= first / 10.0 && monotone;
  return {pass, fmt("median |grad F_nu|^2: t=1 %.4g, t=200 %.4g (drop %.1fx, need 10x); grid trace %s", first, last,
                    first / last, monotone ? "nonincreasing" : "NOT nonincreasing")};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"lasso-proxlinear",
       "problem.name = lasso\nsolver.name = proxlinear\nsolver.iters = 50\nrun.seeds = 1, 2, 3\ninit.kind = gaussian\n"},
      {"pr-pgsg",
       "problem.name = phase_retrieval\nproblem.d = 10\nproblem.m = 80\nproblem.outlier_frac = 0.1\n"
       "solver.name = pgsg\nsolver.iters = 20\nrun.seeds = 1, 2, 3\ninit.kind = gaussian\n"},
      {"logistic-catalyst",
       "problem.name = erm_logistic\nsolver.name = catalyst-svrg\nbaseline.name = svrg\nrun.seeds = 1, 2, 3\n"},
  };
  const auto root = std::filesystem::temp_directory_path() / "proxkit-acceptance-determinism";
  std::filesystem::remove_all(root);
  std::size_t files = 0;
  std::vector<std::string> mismatches;
  for (const auto& [name, text] : configs) {
    const bench::ExperimentConfig config = bench::parse_config(text, name);
    std::vector<std::filesystem::path> dirs;
    for (std::size_t jobs : {1, 3}) {
      bench::RunOptions options;
      options.jobs = jobs;
      options.out_dir = root / name / ("jobs" + std::to_string(jobs));
      const auto bundle = bench::run_experiment(config, options);
      if (!bundle.all_ok()) mismatches.push_back(name + ": run failed");
      dirs.push_back(bundle.out_dir);
    }
    for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
      const auto other = dirs[1] / entry.path().filename();
      ++files;
      if (!std::filesystem::exists(other) || read_file(entry.path()) != read_file(other))
        mismatches.push_back(name + "/" + entry.path().filename().string());
    }
    std::size_t count[2] = {0, 0};
    for (int k = 0; k < 2; ++k)
      for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dirs[k])) ++count[k];
    if (count[0] != count[1]) mismatches.push_back(name + ": file count differs");
  }
  std::filesystem::remove_all(root);
  std::string detail = fmt("3 configs run twice, %zu files compared, %zu mismatches", files, mismatches.size());
  for (const auto& m : mismatches) detail += " [" + m + "]";
  return {mismatches.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"moreau gradient identity", 30, moreau_gradient_identity},
      {"prox-linear equals ISTA on lasso", 10, proxlinear_matches_ista},
      {"surrogate sandwich bound", 120, sandwich_bound},
      {"quadratic local convergence", 120, quadratic_local_convergence},
      {"catalyst speedup on ridge", 60, catalyst_speedup},
      {"ERM acceleration regime", 180, erm_regime_boundary},
      {"momentum recurrence", 1, momentum_recurrence},
      {"PGSG progress", 300, pgsg_progress},
      {"bundle determinism", 300, determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] AC%d %s: %s; %.2fs (limit %.0fs%s)\n", pass ? "PASS" : "FAIL", index, c.name, out.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
