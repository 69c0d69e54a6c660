#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "proxkit/oracles.hpp"
#include "proxkit/random.hpp"
#include "proxkit/report.hpp"

namespace proxkit {

// f(x) = (1/m) sum_i f_i(x) + g(x), with f mu-strongly convex and each f_i
// having a beta_component()-Lipschitz gradient.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double component_value(std::size_t i, const Vector& x) const = 0;
  // out <- grad f_i(x); out is resized as needed.
  virtual void component_gradient(std::size_t i, const Vector& x, Vector& out) const = 0;
  virtual const ProxOracle& regularizer() const = 0;
  virtual double mu() const = 0;
  virtual double beta_component() const = 0;
  // Lipschitz constant of the averaged gradient; defaults to beta_component().
  virtual double beta_full() const { return beta_component(); }

  // Averages over components; data-backed problems override with
  // vectorized versions. Callers count m component gradients per call.
  virtual double smooth_value(const Vector& x) const;
  virtual Vector full_gradient(const Vector& x) const;

  double value(const Vector& x) const { return smooth_value(x) + regularizer().value(x); }
};

// h(x) = f(x) + kappa/2 |x - center|^2: the Catalyst proximal subproblem.
struct CatalystSubproblem {
  const FiniteSumProblem& problem;
  double kappa = 0.0;
  Vector center;

  double mu() const { return problem.mu() + kappa; }
  double value(const Vector& x) const {
    return problem.value(x) + 0.5 * kappa * (x - center).squaredNorm();
  }
};

struct InnerResult {
  Vector point;
  // Certified upper bound on h(point) - min h.
  double bound = 0.0;
  std::uint64_t calls = 0;  // component gradient evaluations
  bool reached = false;
};

class InnerMethod {
 public:
  virtual ~InnerMethod() = default;
  virtual std::string name() const = 0;
  // Runs from warm_start until the certified bound <= target or `budget`
  // component gradients have been spent.
  virtual InnerResult run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                          std::uint64_t budget, RandomStream& rng) const = 0;
  // Modelled linear rate per unit of work on the kappa-regularized problem.
  virtual double tau(const FiniteSumProblem& problem, double kappa) const = 0;
};

// Full-gradient descent with step 1/(beta_full + kappa); the proximal
// variant applies prox of the regularizer, the plain one requires g = 0.
// Bound: h(x+) - h* <= |G(x)|^2 / (2 (mu + kappa)), G the gradient mapping.
class GradientInner final : public InnerMethod {
 public:
  explicit GradientInner(bool proximal) : proximal_(proximal) {}
  std::string name() const override { return proximal_ ? "prox_gd" : "gd"; }
  InnerResult run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                  std::uint64_t budget, RandomStream& rng) const override;
  double tau(const FiniteSumProblem& problem, double kappa) const override;

 private:
  bool proximal_;
};

class SvrgInner final : public InnerMethod {
 public:
  std::string name() const override { return "svrg"; }
  InnerResult run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                  std::uint64_t budget, RandomStream& rng) const override;
  double tau(const FiniteSumProblem& problem, double kappa) const override;
};

std::unique_ptr<InnerMethod> make_inner_method(const std::string& name);

// SVRG on the subproblem: epochs of one full-gradient anchor (m calls)
// followed by m variance-reduced steps (2 calls each) with step
// 1/(10 (beta_component + kappa)). The bound is checked at each anchor;
// the returned point is the gradient-mapping step from that anchor.
InnerResult svrg_run(const CatalystSubproblem& sub, const Vector& warm_start, double target,
                     std::uint64_t budget, RandomStream& rng);

struct MomentumStep {
  double alpha = 0.0;
  double beta = 0.0;
};

// Root in (0, 1] of alpha^2 = (1 - alpha) alpha_prev^2 + q alpha and
// beta = alpha_prev (1 - alpha_prev) / (alpha_prev^2 + alpha).
MomentumStep momentum_update(double alpha_prev, double q);

// kappa minimizing sqrt(mu + kappa) / (tau(kappa) sqrt(mu)):
//   gd, prox_gd: max(beta - 2 mu, 1e-12 beta)
//   svrg:        max((beta - mu)/(m + 1) - mu, 0)
double choose_kappa(const FiniteSumProblem& problem, const std::string& inner_name);

struct CatalystOptions {
  double kappa = 0.0;
  std::size_t outer_iters = 100000;
  // Stop once f(x_t) - f* <= eps. f* is `f_star` when given (evaluation
  // only, not counted), otherwise the certified bound |G(x_t)|^2/(2 mu)
  // paid for with m counted gradients.
  double eps = 1e-6;
  std::optional<double> f_star;
  std::uint64_t inner_budget = 100'000'000;
  // Warm start each subproblem at x_{t-1}; false uses y_{t-1}.
  bool warm_start_prev = true;
  std::size_t iterate_stride = 0;
};

// Catalyst outer loop with subproblem targets eps_t = C (1 - 0.9 sqrt(q))^t,
// C = f(x0) - fhat from a gradient-mapping lower bound at x0.
// kappa = 0 is accepted and means q = 1 (no extrapolation).
SolverReport catalyst_run(const FiniteSumProblem& problem, const InnerMethod& inner,
                          const Vector& x0, const CatalystOptions& options, RandomStream& rng);

struct BaselineOptions {
  std::size_t max_iters = 10'000'000;  // gd steps or svrg epochs
  double eps = 1e-6;
  std::optional<double> f_star;
  std::size_t record_every = 1;
  std::size_t iterate_stride = 0;
};

// Plain (proximal) gradient descent with step 1/beta_full; stops at
// f - f* <= eps (checked for free against f_star) or max_iters.
SolverReport gradient_descent_run(const FiniteSumProblem& problem, const Vector& x0,
                                  const BaselineOptions& options);

// Plain SVRG epochs as in svrg_run on the unregularized problem.
SolverReport svrg_baseline_run(const FiniteSumProblem& problem, const Vector& x0,
                               const BaselineOptions& options, RandomStream& rng);

}  // namespace proxkit
