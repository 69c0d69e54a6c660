#include "proxkit/moreau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "proxkit/functions.hpp"
#include "proxkit/proxlinear.hpp"

namespace proxkit {

void require_convex_subproblem(double nu, double rho) {
  if (!(nu > 0.0)) throw std::invalid_argument("prox_map: nu must be positive");
  if (nu * rho >= 1.0)
    throw NonconvexSubproblem("prox_map: nu = " + std::to_string(nu) +
                              " is not below 1/rho = " + std::to_string(1.0 / rho));
}

MoreauPoint make_moreau_point(double f_at_prox, Vector prox_point, const Vector& z, double nu,
                              double certificate, std::size_t inner_iterations) {
  MoreauPoint mp;
  mp.envelope_value = f_at_prox + (prox_point - z).squaredNorm() / (2.0 * nu);
  mp.envelope_gradient = (z - prox_point) / nu;
  mp.prox_point = std::move(prox_point);
  mp.nu = nu;
  mp.certificate = certificate;
  mp.inner_iterations = inner_iterations;
  return mp;
}

MoreauPoint prox_map(const ProxOracle& f, double nu, const Vector& z, const ProxOptions&) {
  require_convex_subproblem(nu, 0.0);
  Vector p = f.prox(nu, z);
  const double fp = f.value(p);
  return make_moreau_point(fp, std::move(p), z, nu, 0.0, 0);
}

MoreauPoint prox_map(const SmoothPlusProx& f, double nu, const Vector& z, const ProxOptions& options) {
  require_convex_subproblem(nu, f.weak_convexity());
  const double lip = f.smooth->lipschitz() + 1.0 / nu;
  const double mu = 1.0 / nu - f.weak_convexity();
  const double root_q = std::sqrt(mu / lip);
  const double momentum = (1.0 - root_q) / (1.0 + root_q);

  Vector x = f.nonsmooth->prox(1.0 / lip, z);
  Vector x_prev = x;
  Vector best = x;
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < options.budget; ++k) {
    const Vector y = x + momentum * (x - x_prev);
    const Vector grad = f.smooth->gradient(y) + (y - z) / nu;
    Vector x_next = f.nonsmooth->prox(1.0 / lip, y - grad / lip);
    const double residual = lip * (x_next - y).norm();
    x_prev = std::move(x);
    x = std::move(x_next);
    if (residual < best_residual) {
      best_residual = residual;
      best = x;
    }
    if (residual <= options.inner_tol) return make_moreau_point(f.value(x), x, z, nu, residual, k + 1);
  }
  throw BudgetExceeded("prox_map: FISTA budget exhausted at residual " + std::to_string(best_residual),
                       best, best_residual);
}

MoreauPoint prox_map(const CompositeProblem& f, double nu, const Vector& z, const ProxOptions& options) {
  require_convex_subproblem(nu, f.weak_convexity());
  CompositeProblem sub = f;
  sub.g = std::make_shared<ShiftedQuadratic>(f.g, z, nu);
  // The model error of the subproblem is that of F; any positive penalty
  // works when the map is affine.
  const double penalty = f.weak_convexity() > 0.0 ? f.weak_convexity() : 1e-3 / nu;
  const double gap_tol = std::max(1e-3 * options.inner_tol * options.inner_tol / penalty, 1e-300);

  Vector x = z;
  Vector dual;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t inner = 0;
  for (std::size_t k = 0; k < options.budget; ++k) {
    ProxLinearStep step;
    try {
      step = proxlinear_step(sub, x, penalty, gap_tol, 200000, dual.size() ? &dual : nullptr);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(std::string("prox_map: ") + e.what(), x, residual);
    }
    inner += step.inner_iterations;
    residual = step.surrogate.norm;
    dual = std::move(step.dual);
    x = std::move(step.x_next);
    if (residual <= options.inner_tol) return make_moreau_point(f.value(x), x, z, nu, residual, inner);
  }
  throw BudgetExceeded("prox_map: prox-linear budget exhausted at residual " + std::to_string(residual),
                       x, residual);
}

}  // namespace proxkit
