#include "proxkit/pgsg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "proxkit/errors.hpp"
#include "proxkit/moreau.hpp"

namespace proxkit {

PgsgSchedule default_schedule(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw InvalidModulus("default_schedule: rho must be positive and finite, got " + std::to_string(rho));
  const auto offset = static_cast<std::size_t>(std::ceil(648.0 * std::log(648.0)));
  PgsgSchedule schedule;
  schedule.inner_counts = [offset](std::size_t t) { return t + offset; };
  schedule.inner_steps = [rho](std::size_t j) { return 2.0 / (rho * (static_cast<double>(j) + 49.0)); };
  return schedule;
}

namespace {

bool on_grid(std::size_t t, std::size_t every, std::size_t last) {
  return t <= 1 || t == last || (every > 0 && t % every == 0);
}

}  // namespace

SolverReport pgsg_run(const StochasticProblem& problem, const Vector& x0, const PgsgSchedule& schedule,
                      RandomStream& rng, const PgsgOptions& options) {
  const double rho = problem.weak_convexity();
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw InvalidModulus("pgsg_run: weak convexity modulus must be positive, got " + std::to_string(rho));
  require_finite(x0, "pgsg_run: x0");
  if (static_cast<std::size_t>(x0.size()) != problem.dim())
    throw std::invalid_argument("pgsg_run: x0 has the wrong dimension");

  SolverReport report;
  report.solver = "pgsg";
  report.primary_counter = "subgradient";
  report.iterate_stride = options.iterate_stride;
  report.status = "max_iters";
  report.seed = rng.seed();
  ReportRecorder recorder(report);

  const std::size_t T = options.outer_iters;
  const std::size_t selected_index = T > 0 ? 1 + static_cast<std::size_t>(rng.uniform_index(T)) : 0;

  const double nu = 1.0 / (2.0 * rho);
  const CompositeProblem* composite = problem.full_composite();
  const bool exact = composite != nullptr && nu * composite->weak_convexity() < 1.0;
  ProxOptions prox_options;
  prox_options.inner_tol = options.stat_inner_tol;

  auto objective = [&](const Vector& x) {
    return problem.full_value(x).value_or(std::numeric_limits<double>::quiet_NaN());
  };

  // One outer step from x_t; j_t - 1 subgradient steps.
  auto outer_step = [&](std::size_t t, const Vector& x_t) {
    const std::size_t count = schedule.inner_counts(t);
    if (count == 0) throw std::invalid_argument("pgsg_run: inner count must be >= 1");
    Vector y = x_t;
    Vector sum = y;
    for (std::size_t j = 0; j + 1 < count; ++j) {
      const SampleHandle zeta = problem.sample(rng);
      const Vector v = problem.stoch_subgradient(y, zeta);
      report.counters.subgradient += 1;
      if (!all_finite(v))
        throw OracleFailure("pgsg_run: non-finite subgradient at outer t = " + std::to_string(t) +
                            ", inner j = " + std::to_string(j));
      y -= schedule.inner_steps(j) * (v + 2.0 * rho * (y - x_t));
      if (options.projector != nullptr) y = options.projector->project(y);
      sum += y;
    }
    return Vector(sum / static_cast<double>(count));
  };

  auto exact_stationarity = [&](const Vector& x) {
    return prox_map(*composite, nu, x, prox_options).envelope_gradient.norm();
  };

  Vector x = x0;
  double best_stat = std::numeric_limits<double>::infinity();
  Vector best = x0;
  Vector selected = x0;
  for (std::size_t t = 0; t <= T; ++t) {
    recorder.store_iterate(t, x);
    if (t == selected_index) selected = x;
    const bool record = on_grid(t, options.record_every, T);
    if (t == T && !(record && !exact)) {
      if (record) {
        const double stat = exact_stationarity(x);
        recorder.record(t, objective(x), stat);
        if (t >= 1 && stat < best_stat) {
          best_stat = stat;
          best = x;
        }
      }
      break;
    }
    // In proxy mode the final row needs one more step to form x_{T+1}.
    Vector next = outer_step(t, x);
    if (record) {
      const double stat = exact ? exact_stationarity(x) : 2.0 * rho * (x - next).norm();
      recorder.record(t, objective(x), stat);
      if (t >= 1 && stat < best_stat) {
        best_stat = stat;
        best = x;
      }
    }
    if (t == T) break;
    x = std::move(next);
  }

  report.final_point = x;
  report.named_points = {{"best", best}, {"selected", selected}};
  return report;
}

}  // namespace proxkit
