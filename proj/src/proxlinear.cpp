#include "proxkit/proxlinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "proxkit/errors.hpp"

namespace proxkit {

LocalModel::LocalModel(const CompositeProblem& problem, Vector anchor)
    : problem_(problem), anchor_(std::move(anchor)), c_anchor_(problem.c->eval(anchor_)) {}

Vector LocalModel::linearized_map(const Vector& x) const {
  return c_anchor_ + problem_.c->jvp(anchor_, x - anchor_);
}

double LocalModel::value(const Vector& x) const {
  return problem_.g->value(x) + problem_.h->value(linearized_map(x));
}

double model_value(const CompositeProblem& problem, const Vector& y, const Vector& x) {
  require_same_dim(x, y, "model_value");
  return LocalModel(problem, y).value(x);
}

ProxLinearStep proxlinear_step(const CompositeProblem& problem, const Vector& x_t, double beta,
                               double inner_tol, std::size_t inner_budget, const Vector* warm_dual,
                               OracleCounters* counters) {
  if (!(inner_tol > 0.0)) throw std::invalid_argument("proxlinear_step: inner_tol must be positive");
  require_finite(x_t, "proxlinear_step: x_t");
  const LocalModel model(problem, x_t);
  SaddleOptions opts;
  opts.gap_tol = inner_tol;
  opts.max_iters = inner_budget;
  const SaddleResult sol = solve_linearized_subproblem(model, beta, opts, warm_dual);
  if (counters) {
    counters->map_eval += 1;
    counters->jvp += sol.jvp_calls;
    counters->vjp += sol.vjp_calls;
    counters->inner_iterations += sol.iterations;
  }
  if (!sol.converged)
    throw BudgetExceeded("proxlinear_step: inner budget of " + std::to_string(inner_budget) +
                             " iterations exhausted at gap " + std::to_string(sol.gap),
                         sol.x, sol.gap);

  ProxLinearStep step;
  step.x_next = sol.x;
  step.surrogate.g_vec = beta * (sol.x - x_t);
  step.surrogate.norm = step.surrogate.g_vec.norm();
  step.surrogate.beta_used = beta;
  step.gap = sol.gap;
  step.inner_iterations = sol.iterations;
  step.dual = sol.dual;
  return step;
}

SolverReport proxlinear_run(const CompositeProblem& problem, const Vector& x0,
                            const ProxLinearOptions& options) {
  const double beta = options.beta > 0.0 ? options.beta : problem.L * problem.beta;
  const double inner_tol = options.inner_tol > 0.0 ? options.inner_tol : options.stat_tol / 100.0;
  require_finite(x0, "proxlinear_run: x0");

  SolverReport report;
  report.solver = "proxlinear";
  report.primary_counter = "vjp";
  report.iterate_stride = options.iterate_stride;
  report.status = "max_iters";
  ReportRecorder recorder(report);

  Vector x = x0;
  Vector dual;
  for (std::size_t t = 0; t < options.outer_iters; ++t) {
    ProxLinearStep step;
    try {
      step = proxlinear_step(problem, x, beta, inner_tol, options.inner_budget,
                             dual.size() ? &dual : nullptr, &report.counters);
    } catch (const BudgetExceeded& e) {
      report.final_point = x;
      report.status = "budget_exceeded";
      throw BudgetExceeded(e.what(), e.best_point, e.achieved,
                           std::make_shared<const SolverReport>(report));
    }
    recorder.record(t, problem.value(x), step.surrogate.norm);
    recorder.store_iterate(t, x);
    dual = std::move(step.dual);
    x = std::move(step.x_next);
    if (step.surrogate.norm <= options.stat_tol) {
      report.status = "converged";
      break;
    }
  }
  report.final_point = x;
  return report;
}

std::string to_string(RateEstimate::Kind kind) {
  switch (kind) {
    case RateEstimate::Kind::quadratic:
      return "quadratic";
    case RateEstimate::Kind::linear:
      return "linear";
    case RateEstimate::Kind::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

RateEstimate estimate_local_rate(std::span<const double> history) {
  std::vector<double> r(history.begin(), history.end());
  while (!r.empty() && r.back() == 0.0) r.pop_back();
  if (r.size() < 4) throw std::invalid_argument("estimate_local_rate: need at least 4 nonzero entries");
  for (double v : r)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("estimate_local_rate: entries must be positive and finite");

  RateEstimate est;
  const std::size_t n = r.size();

  bool quadratic = true;
  for (std::size_t k = n - 4; k < n; ++k) quadratic = quadratic && r[k] < 1.0;
  for (std::size_t k = n - 4; quadratic && k + 1 < n; ++k)
    quadratic = std::log(r[k + 1]) / std::log(r[k]) > 1.8;

  const std::size_t window = std::max<std::size_t>(4, n / 2);
  const std::size_t first = n - window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = first; k < n; ++k) {
    const double xk = static_cast<double>(k - first);
    const double yk = std::log(r[k]);
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
  }
  const double w = static_cast<double>(window);
  const double slope = (w * sxy - sx * sy) / (w * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / w;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / w;
  for (std::size_t k = first; k < n; ++k) {
    const double yk = std::log(r[k]);
    const double fit = intercept + slope * static_cast<double>(k - first);
    ss_res += (yk - fit) * (yk - fit);
    ss_tot += (yk - mean) * (yk - mean);
  }
  est.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  est.rate = std::exp(slope);

  if (quadratic)
    est.kind = RateEstimate::Kind::quadratic;
  else if (est.r_squared >= 0.9)
    est.kind = RateEstimate::Kind::linear;
  return est;
}

}  // namespace proxkit
