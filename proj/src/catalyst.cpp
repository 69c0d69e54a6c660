#include "proxkit/catalyst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "proxkit/errors.hpp"

namespace proxkit {

double FiniteSumProblem::smooth_value(const Vector& x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += component_value(i, x);
  return total / static_cast<double>(size());
}

Vector FiniteSumProblem::full_gradient(const Vector& x) const {
  Vector sum = Vector::Zero(x.size());
  Vector g;
  for (std::size_t i = 0; i < size(); ++i) {
    component_gradient(i, x, g);
    sum += g;
  }
  return sum / static_cast<double>(size());
}

namespace {

// Gradient of the smooth part of the subproblem; m component gradients.
Vector sub_gradient(const CatalystSubproblem& sub, const Vector& x) {
  Vector g = sub.problem.full_gradient(x);
  if (sub.kappa > 0.0) g += sub.kappa * (x - sub.center);
  return g;
}

struct GradientMapping {
  Vector next;  // prox_{g/L}(x - grad/L)
  double norm = 0.0;
  double bound = 0.0;  // h(next) - h* <= norm^2 / (2 mu)
};

GradientMapping gradient_mapping(const CatalystSubproblem& sub, const Vector& x, const Vector& grad) {
  const double lip = sub.problem.beta_full() + sub.kappa;
  GradientMapping gm;
  gm.next = sub.problem.regularizer().prox(1.0 / lip, x - grad / lip);
  gm.norm = lip * (x - gm.next).norm();
  gm.bound = gm.norm * gm.norm / (2.0 * sub.mu());
  return gm;
}

void check_finite(const Vector& x, const char* where) {
  if (!all_finite(x)) throw OracleFailure(std::string(where) + ": non-finite iterate");
}

}  // namespace

InnerResult GradientInner::run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                               std::uint64_t budget, RandomStream&) const {
  if (!proximal_ && sub.problem.regularizer().name() != "zero")
    throw std::invalid_argument("gd inner method requires a zero regularizer; use prox_gd");
  const std::uint64_t m = sub.problem.size();
  InnerResult result;
  result.point = warm_start;
  result.bound = std::numeric_limits<double>::infinity();
  Vector x = warm_start;
  while (result.calls + m <= budget) {
    const Vector grad = sub_gradient(sub, x);
    result.calls += m;
    GradientMapping gm = gradient_mapping(sub, x, grad);
    check_finite(gm.next, "gradient inner method");
    result.point = gm.next;
    result.bound = gm.bound;
    if (gm.bound <= target) {
      result.reached = true;
      break;
    }
    x = std::move(gm.next);
  }
  return result;
}

double GradientInner::tau(const FiniteSumProblem& problem, double kappa) const {
  return (problem.mu() + kappa) / (problem.beta_full() + kappa) / static_cast<double>(problem.size());
}

InnerResult SvrgInner::run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                           std::uint64_t budget, RandomStream& rng) const {
  return svrg_run(sub, warm_start, target, budget, rng);
}

double SvrgInner::tau(const FiniteSumProblem& problem, double kappa) const {
  const double m = static_cast<double>(problem.size());
  return 1.0 / (m + (problem.beta_component() + kappa) / (problem.mu() + kappa));
}

std::unique_ptr<InnerMethod> make_inner_method(const std::string& name) {
  if (name == "gd") return std::make_unique<GradientInner>(false);
  if (name == "prox_gd") return std::make_unique<GradientInner>(true);
  if (name == "svrg") return std::make_unique<SvrgInner>();
  throw std::invalid_argument("unknown inner method '" + name + "'");
}

namespace {

// m variance-reduced steps from the anchor; 2 calls each.
Vector svrg_epoch(const CatalystSubproblem& sub, const Vector& anchor, const Vector& anchor_grad,
                  std::uint64_t steps, RandomStream& rng, std::uint64_t& calls) {
  const auto& problem = sub.problem;
  const double eta = 1.0 / (10.0 * (problem.beta_component() + sub.kappa));
  const ProxOracle& g = problem.regularizer();
  Vector x = anchor;
  Vector gi, ga;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto i = static_cast<std::size_t>(rng.uniform_index(problem.size()));
    problem.component_gradient(i, x, gi);
    problem.component_gradient(i, anchor, ga);
    calls += 2;
    Vector v = gi - ga + anchor_grad;
    if (sub.kappa > 0.0) v += sub.kappa * (x - anchor);
    x = g.prox(eta, x - eta * v);
  }
  check_finite(x, "svrg");
  return x;
}

}  // namespace

InnerResult svrg_run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                     std::uint64_t budget, RandomStream& rng) {
  const std::uint64_t m = sub.problem.size();
  InnerResult result;
  result.point = warm_start;
  result.bound = std::numeric_limits<double>::infinity();
  Vector anchor = warm_start;
  while (result.calls + m <= budget) {
    const Vector grad = sub_gradient(sub, anchor);
    result.calls += m;
    const GradientMapping gm = gradient_mapping(sub, anchor, grad);
    result.point = gm.next;
    result.bound = gm.bound;
    if (gm.bound <= target) {
      result.reached = true;
      break;
    }
    if (result.calls + 2 * m > budget) break;
    anchor = svrg_epoch(sub, anchor, grad, m, rng, result.calls);
  }
  return result;
}

MomentumStep momentum_update(double alpha_prev, double q) {
  if (!(alpha_prev > 0.0 && alpha_prev <= 1.0))
    throw std::domain_error("momentum_update: alpha_prev must lie in (0, 1]");
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("momentum_update: q must lie in (0, 1]");
  const double c = alpha_prev * alpha_prev;
  const double b = c - q;
  const double disc = std::sqrt(b * b + 4.0 * c);
  MomentumStep step;
  step.alpha = b > 0.0 ? 2.0 * c / (b + disc) : 0.5 * (disc - b);
  step.beta = alpha_prev * (1.0 - alpha_prev) / (c + step.alpha);
  return step;
}

double choose_kappa(const FiniteSumProblem& problem, const std::string& inner_name) {
  const double mu = problem.mu();
  if (inner_name == "gd" || inner_name == "prox_gd") {
    const double beta = problem.beta_full();
    return std::max(beta - 2.0 * mu, 1e-12 * beta);
  }
  if (inner_name == "svrg") {
    const double m = static_cast<double>(problem.size());
    return std::max((problem.beta_component() - mu) / (m + 1.0) - mu, 0.0);
  }
  throw std::invalid_argument("choose_kappa: unknown inner method '" + inner_name + "'");
}

namespace {

// Evaluation-only objective and gradient-mapping norm; not counted.
void record_state(ReportRecorder& recorder, const FiniteSumProblem& problem, std::size_t t, const Vector& x) {
  const CatalystSubproblem plain{problem, 0.0, Vector()};
  const GradientMapping gm = gradient_mapping(plain, x, problem.full_gradient(x));
  recorder.record(t, problem.value(x), gm.norm);
}

void validate(const FiniteSumProblem& problem, const Vector& x0, const char* who) {
  if (problem.size() == 0) throw EmptyInput(std::string(who) + ": problem has no components");
  if (!(problem.mu() > 0.0)) throw std::invalid_argument(std::string(who) + ": mu must be positive");
  if (static_cast<std::size_t>(x0.size()) != problem.dim())
    throw std::invalid_argument(std::string(who) + ": x0 has the wrong dimension");
  require_finite(x0, std::string(who) + ": x0");
}

}  // namespace

SolverReport catalyst_run(const FiniteSumProblem& problem, const InnerMethod& inner, const Vector& x0,
                          const CatalystOptions& options, RandomStream& rng) {
  validate(problem, x0, "catalyst_run");
  if (!(options.kappa >= 0.0) || !std::isfinite(options.kappa))
    throw std::invalid_argument("catalyst_run: kappa must be finite and >= 0");

  SolverReport report;
  report.solver = "catalyst-" + inner.name();
  report.primary_counter = "component_gradient";
  report.iterate_stride = options.iterate_stride;
  report.status = "max_iters";
  report.seed = rng.seed();
  ReportRecorder recorder(report);

  const std::uint64_t m = problem.size();
  const double mu = problem.mu();
  const double kappa = options.kappa;
  const double q = mu / (mu + kappa);

  // C = f(x0) - fhat with fhat a certified lower bound on f*.
  const CatalystSubproblem plain{problem, 0.0, Vector()};
  const GradientMapping gm0 = gradient_mapping(plain, x0, problem.full_gradient(x0));
  report.counters.component_gradient += m;
  const double f0 = problem.value(x0);
  const double lower = problem.value(gm0.next) - gm0.norm * gm0.norm / (2.0 * mu);
  const double scale = std::max(f0 - lower, 0.0);

  auto done = [&](const Vector& x, Vector& certified) {
    if (options.f_star) return problem.value(x) - *options.f_star <= options.eps;
    const GradientMapping gm = gradient_mapping(plain, x, problem.full_gradient(x));
    report.counters.component_gradient += m;
    certified = gm.next;
    return gm.bound <= options.eps;
  };

  Vector x_prev = x0;
  Vector y = x0;
  double alpha = std::sqrt(q);
  const double decay = 1.0 - 0.9 * std::sqrt(q);

  record_state(recorder, problem, 0, x0);
  recorder.store_iterate(0, x0);
  Vector certified;
  if (done(x0, certified)) {
    report.status = "converged";
    report.final_point = options.f_star ? x0 : certified;
    return report;
  }

  for (std::size_t t = 1; t <= options.outer_iters; ++t) {
    const double target = scale * std::pow(decay, static_cast<double>(t));
    const CatalystSubproblem sub{problem, kappa, y};
    const Vector& warm = options.warm_start_prev ? x_prev : y;
    InnerResult r = inner.run(sub, warm, target, options.inner_budget, rng);
    report.counters.component_gradient += r.calls;
    report.counters.inner_iterations += 1;
    if (!r.reached) {
      report.status = "budget_exceeded";
      report.final_point = r.point;
      record_state(recorder, problem, t, r.point);
      auto partial = std::make_shared<SolverReport>(report);
      throw BudgetExceeded("catalyst_run: inner budget exhausted at outer iteration " + std::to_string(t) +
                               " (bound " + std::to_string(r.bound) + " > target " +
                               std::to_string(target) + ")",
                           r.point, r.bound, partial);
    }
    Vector x = std::move(r.point);

    MomentumStep step{1.0, 0.0};
    if (q < 1.0) step = momentum_update(alpha, q);
    y = x + step.beta * (x - x_prev);
    alpha = step.alpha;

    record_state(recorder, problem, t, x);
    recorder.store_iterate(t, x);
    x_prev = x;
    if (done(x, certified)) {
      report.status = "converged";
      report.final_point = options.f_star ? x : certified;
      return report;
    }
  }
  report.final_point = x_prev;
  return report;
}

SolverReport gradient_descent_run(const FiniteSumProblem& problem, const Vector& x0,
                                  const BaselineOptions& options) {
  validate(problem, x0, "gradient_descent_run");
  SolverReport report;
  report.solver = problem.regularizer().name() == "zero" ? "gd" : "prox_gd";
  report.primary_counter = "component_gradient";
  report.iterate_stride = options.iterate_stride;
  report.status = "max_iters";
  ReportRecorder recorder(report);

  const std::uint64_t m = problem.size();
  const CatalystSubproblem plain{problem, 0.0, Vector()};
  Vector x = x0;
  for (std::size_t k = 0; k <= options.max_iters; ++k) {
    const Vector grad = problem.full_gradient(x);
    GradientMapping gm = gradient_mapping(plain, x, grad);
    check_finite(gm.next, "gradient_descent_run");
    const double f = problem.value(x);
    const bool stop = options.f_star ? f - *options.f_star <= options.eps : gm.bound <= options.eps;
    const bool last = stop || k == options.max_iters;
    if (last || options.record_every == 0 || k % options.record_every == 0) recorder.record(k, f, gm.norm);
    recorder.store_iterate(k, x);
    if (stop) {
      report.status = "converged";
      report.final_point = options.f_star ? x : gm.next;
      return report;
    }
    if (k == options.max_iters) break;
    report.counters.component_gradient += m;
    x = std::move(gm.next);
  }
  report.final_point = x;
  return report;
}

SolverReport svrg_baseline_run(const FiniteSumProblem& problem, const Vector& x0,
                               const BaselineOptions& options, RandomStream& rng) {
  validate(problem, x0, "svrg_baseline_run");
  SolverReport report;
  report.solver = "svrg";
  report.primary_counter = "component_gradient";
  report.iterate_stride = options.iterate_stride;
  report.status = "max_iters";
  report.seed = rng.seed();
  ReportRecorder recorder(report);

  const std::uint64_t m = problem.size();
  const CatalystSubproblem plain{problem, 0.0, Vector()};
  Vector anchor = x0;
  for (std::size_t k = 0; k <= options.max_iters; ++k) {
    const Vector grad = problem.full_gradient(anchor);
    report.counters.component_gradient += m;
    const GradientMapping gm = gradient_mapping(plain, anchor, grad);
    const double f = problem.value(anchor);
    const bool stop = options.f_star ? f - *options.f_star <= options.eps : gm.bound <= options.eps;
    const bool last = stop || k == options.max_iters;
    if (last || options.record_every == 0 || k % options.record_every == 0) recorder.record(k, f, gm.norm);
    recorder.store_iterate(k, anchor);
    if (stop) {
      report.status = "converged";
      report.final_point = options.f_star ? anchor : gm.next;
      return report;
    }
    if (k == options.max_iters) break;
    std::uint64_t calls = 0;
    anchor = svrg_epoch(plain, anchor, grad, m, rng, calls);
    report.counters.component_gradient += calls;
  }
  report.final_point = anchor;
  return report;
}

}  // namespace proxkit
