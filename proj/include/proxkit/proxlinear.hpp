#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "proxkit/oracles.hpp"
#include "proxkit/report.hpp"

namespace proxkit {

// F(x; y) = g(x) + h(c(y) + grad c(y)(x - y)), the convex model of a
// composite problem linearized at the anchor y.
class LocalModel {
 public:
  LocalModel(const CompositeProblem& problem, Vector anchor);

  const Vector& anchor() const { return anchor_; }
  const Vector& c_at_anchor() const { return c_anchor_; }
  const CompositeProblem& problem() const { return problem_; }

  // c(y) + grad c(y)(x - y); one jvp.
  Vector linearized_map(const Vector& x) const;
  double value(const Vector& x) const;

 private:
  const CompositeProblem& problem_;
  Vector anchor_;
  Vector c_anchor_;
};

double model_value(const CompositeProblem& problem, const Vector& y, const Vector& x);

// Settings for the primal-dual (Chambolle-Pock) solver of
//   min_x g(x) + h(c(y) + J (x - y)) + beta/2 |x - y|^2
// via the saddle form
//   min_x max_u g(x) + <u, c(y) + J (x - y)> - h*(u) + beta/2 |x - y|^2.
struct SaddleOptions {
  double gap_tol = 1e-10;
  std::size_t max_iters = 200000;
  int power_iters = 20;
  std::size_t check_every = 10;
  // Primal step scale w: tau = w / |J|, sigma = 0.95 / (w |J|).
  // <= 0 picks it from the data.
  double primal_weight = 0.0;
};

struct SaddleResult {
  Vector x;
  Vector dual;
  double gap = 0.0;
  double primal_value = 0.0;
  std::size_t iterations = 0;
  std::uint64_t jvp_calls = 0;
  std::uint64_t vjp_calls = 0;
  bool converged = false;
};

// Solves the linearized proximal subproblem anchored at `anchor` with
// penalty beta. `warm_dual` (size m) seeds the dual iterate when given.
SaddleResult solve_linearized_subproblem(const LocalModel& model, double beta,
                                         const SaddleOptions& options,
                                         const Vector* warm_dual = nullptr);

struct SurrogateGradient {
  Vector g_vec;  // beta (x_next - x_t)
  double norm = 0.0;
  double beta_used = 0.0;
};

struct ProxLinearStep {
  Vector x_next;
  SurrogateGradient surrogate;
  double gap = 0.0;
  std::size_t inner_iterations = 0;
  Vector dual;
};

// x_next = argmin_x F(x; x_t) + beta/2 |x - x_t|^2, certified to a
// primal-dual gap <= inner_tol. Throws BudgetExceeded (best point, gap)
// when the inner budget runs out.
ProxLinearStep proxlinear_step(const CompositeProblem& problem, const Vector& x_t, double beta,
                               double inner_tol, std::size_t inner_budget = 200000,
                               const Vector* warm_dual = nullptr,
                               OracleCounters* counters = nullptr);

struct ProxLinearOptions {
  // Penalty; <= 0 uses L * beta of the problem.
  double beta = 0.0;
  std::size_t outer_iters = 100;
  double stat_tol = 1e-8;
  // <= 0 uses stat_tol / 100.
  double inner_tol = 0.0;
  std::size_t inner_budget = 200000;
  std::size_t iterate_stride = 0;
};

// Iterates proxlinear_step until |G(x_t)| <= stat_tol or outer_iters steps.
// objective[k] = F(x_k), stationarity[k] = |G(x_k)|; final_point is the
// last computed step x_{t+1}.
SolverReport proxlinear_run(const CompositeProblem& problem, const Vector& x0,
                            const ProxLinearOptions& options);

struct RateEstimate {
  enum class Kind { quadratic, linear, undetermined };
  Kind kind = Kind::undetermined;
  double rate = 0.0;       // geometric rate for Kind::linear
  double r_squared = 0.0;  // of the log-linear fit
};

std::string to_string(RateEstimate::Kind kind);

// Classifies the tail of a residual history: quadratic when the last three
// successive ratios log r_{k+1} / log r_k exceed 1.8 (all entries < 1);
// otherwise linear(rate) from a least-squares fit of log r_k over the last
// max(4, n/2) entries if R^2 >= 0.9; else undetermined. Trailing zeros are
// dropped first. Throws std::invalid_argument with fewer than four entries.
RateEstimate estimate_local_rate(std::span<const double> history);

}  // namespace proxkit
