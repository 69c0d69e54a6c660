#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "proxkit/vector.hpp"

namespace proxkit {

struct SolverReport;

// A finite-difference probe hit a non-finite function value.
class ProbeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested proximal parameter nu >= 1/rho: the subproblem is not convex.
class NonconvexSubproblem : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidModulus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An oracle returned NaN/Inf; the message carries the iteration context.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative solve ran out of budget before reaching its tolerance.
// Carries the best point found and the residual/gap it achieved; solvers
// that produce a SolverReport attach the partial report as well.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, Vector best, double achieved_residual,
                 std::shared_ptr<const SolverReport> partial = nullptr)
      : std::runtime_error(what),
        best_point(std::move(best)),
        achieved(achieved_residual),
        partial_report(std::move(partial)) {}

  Vector best_point;
  double achieved;
  std::shared_ptr<const SolverReport> partial_report;
};

}  // namespace proxkit
