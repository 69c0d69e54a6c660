#pragma once

#include <cstddef>
#include <functional>

#include "proxkit/oracles.hpp"
#include "proxkit/random.hpp"

namespace proxkit {

using ScalarFunction = std::function<double(const Vector&)>;

// Default central-difference step 1e-5 * (1 + |x|_inf).
double default_fd_step(const Vector& x);

// Componentwise (f(x + h e_i) - f(x - h e_i)) / (2h). Throws ProbeFailure
// when f is not finite at a probe point.
Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x, double h);
Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x);

struct WeakConvexityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  // Largest violation of either test, scaled by 1 + |f|; <= 0 when none.
  double worst_gap = 0.0;
};

// Randomized audit of rho-weak convexity: midpoint convexity of
// f + rho/2 |.|^2 and the subgradient inequality, each run `trials` times on
// points drawn at log-uniform scales in [1e-3, 10]. A violation is counted
// when a test fails by more than 1e-8 * (1 + |f|).
WeakConvexityReport check_weak_convexity(const SubgradientOracle& f, double rho, std::size_t dim,
                                         RandomStream& sampler, std::size_t trials);

struct AdjointReport {
  std::size_t trials = 0;
  // max |<u, Jv> - <J^T u, v>| / (1 + |<u, Jv>|)
  double worst_relative_error = 0.0;
};

// Compares <u, jvp(x, v)> with <vjp(x, u), v> on standard normal triples.
AdjointReport check_adjoint(const SmoothMap& c, RandomStream& sampler, std::size_t trials);

// Largest singular value of grad c(x) by power iteration on J^T J, from a
// fixed deterministic start vector. Underestimates by at most the power
// method's truncation error.
double jacobian_norm_estimate(const SmoothMap& c, const Vector& x, int iterations = 20);

// Largest eigenvalue of a symmetric positive semidefinite operator given as
// a product, by power iteration from a fixed start vector.
double power_iteration(const std::function<Vector(const Vector&)>& apply, std::size_t dim,
                       int iterations);

}  // namespace proxkit
