#pragma once

#include <cstddef>

#include "proxkit/errors.hpp"
#include "proxkit/oracles.hpp"
#include "proxkit/report.hpp"

namespace proxkit {

// Output of a certified proximal map prox_{nu f}(z) together with the
// Moreau envelope f_nu(z) = f(p) + |p - z|^2 / (2 nu) and its gradient
// (z - p) / nu.
struct MoreauPoint {
  Vector prox_point;
  double envelope_value = 0.0;
  Vector envelope_gradient;
  double nu = 0.0;
  // Stationarity residual of the subproblem at termination; 0 for closed forms.
  double certificate = 0.0;
  std::size_t inner_iterations = 0;
};

struct ProxOptions {
  double inner_tol = 1e-10;
  // Iteration cap of the inner solver (FISTA steps or prox-linear steps).
  std::size_t budget = 20000;
};

MoreauPoint make_moreau_point(double f_at_prox, Vector prox_point, const Vector& z, double nu,
                              double certificate, std::size_t inner_iterations);

// Closed-form prox; certificate 0.
MoreauPoint prox_map(const ProxOracle& f, double nu, const Vector& z, const ProxOptions& options = {});

// Strongly convex FISTA on smooth(x) + |x - z|^2/(2 nu) + nonsmooth(x);
// certificate is the norm of the proximal-gradient mapping.
MoreauPoint prox_map(const SmoothPlusProx& f, double nu, const Vector& z,
                     const ProxOptions& options = {});

// Prox-linear iterations on the composite problem with g replaced by
// g + |. - z|^2/(2 nu); certificate is the prox-linear surrogate norm.
MoreauPoint prox_map(const CompositeProblem& f, double nu, const Vector& z,
                     const ProxOptions& options = {});

// Throws NonconvexSubproblem unless nu * rho < 1.
void require_convex_subproblem(double nu, double rho);

// x_{t+1} = prox_{nu f}(x_t) until |(x_t - x_{t+1}) / nu| < step_tol.
// stationarity[t] = |grad f_nu(x_t)|.
template <class Function>
SolverReport proximal_point_run(const Function& f, double nu, const Vector& x0,
                                std::size_t max_iters, double step_tol,
                                const ProxOptions& inner = {}, std::size_t iterate_stride = 1) {
  if (!(step_tol >= 0.0)) throw std::invalid_argument("proximal_point_run: step_tol must be >= 0");
  SolverReport report;
  report.solver = "proximal_point";
  report.primary_counter = "prox";
  report.iterate_stride = iterate_stride;
  report.status = "max_iters";
  ReportRecorder recorder(report);

  Vector x = x0;
  for (std::size_t t = 0; t < max_iters; ++t) {
    const MoreauPoint mp = prox_map(f, nu, x, inner);
    report.counters.prox += 1;
    report.counters.inner_iterations += mp.inner_iterations;
    const double stat = mp.envelope_gradient.norm();
    recorder.record(t, f.value(x), stat);
    recorder.store_iterate(t, x);
    x = mp.prox_point;
    if (stat < step_tol) {
      report.status = "converged";
      break;
    }
  }
  report.final_point = x;
  return report;
}

}  // namespace proxkit
