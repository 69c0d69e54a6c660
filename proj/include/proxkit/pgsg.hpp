#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "proxkit/errors.hpp"
#include "proxkit/functions.hpp"
#include "proxkit/oracles.hpp"
#include "proxkit/random.hpp"
#include "proxkit/report.hpp"

namespace proxkit {

// Opaque draw of the random variable zeta.
using SampleHandle = std::uint64_t;

// F(x) = E_zeta f(x, zeta) with x -> f(x, zeta) rho-weakly convex and
// L-Lipschitz for every zeta.
class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;
  virtual std::size_t dim() const = 0;
  virtual SampleHandle sample(RandomStream& rng) const = 0;
  virtual double stoch_value(const Vector& x, SampleHandle zeta) const = 0;
  virtual Vector stoch_subgradient(const Vector& x, SampleHandle zeta) const = 0;
  virtual double weak_convexity() const = 0;
  virtual double lipschitz() const = 0;
  // Exact F, available on synthetic instances for evaluation only.
  virtual std::optional<double> full_value(const Vector&) const { return std::nullopt; }
  // F as a composite problem, used to evaluate Moreau envelope gradients.
  virtual const CompositeProblem* full_composite() const { return nullptr; }
};

// x -> f(x, zeta) for one fixed zeta, for spot checks of weak convexity.
class FixedSampleView final : public SubgradientOracle {
 public:
  FixedSampleView(const StochasticProblem& problem, SampleHandle zeta)
      : problem_(problem), zeta_(zeta) {}
  double value(const Vector& x) const override { return problem_.stoch_value(x, zeta_); }
  Vector subgradient(const Vector& x) const override { return problem_.stoch_subgradient(x, zeta_); }
  double weak_convexity() const override { return problem_.weak_convexity(); }
  double lipschitz() const override { return problem_.lipschitz(); }

 private:
  const StochasticProblem& problem_;
  SampleHandle zeta_;
};

struct PgsgSchedule {
  std::function<std::size_t(std::size_t)> inner_counts;  // t -> j_t >= 1
  std::function<double(std::size_t)> inner_steps;        // j -> alpha_j > 0
};

// j_t = t + ceil(648 ln 648) = t + 4196 and alpha_j = 2 / (rho (j + 49)).
// Throws InvalidModulus for rho <= 0.
PgsgSchedule default_schedule(double rho);

struct PgsgOptions {
  std::size_t outer_iters = 100;
  // Stationarity is recorded at t = 0, 1, every record_every-th t, and t = T.
  std::size_t record_every = 1;
  // Accuracy of the deterministic prox solve behind |grad F_{1/(2 rho)}|.
  double stat_inner_tol = 1e-8;
  std::size_t iterate_stride = 0;
  const BoxIndicator* projector = nullptr;
};

// Proximally guided stochastic subgradient method. Each outer step t
// warm-starts y_0 = x_t, takes j_t - 1 steps
//   y_{j+1} = proj(y_j - alpha_j (v_j + 2 rho (y_j - x_t))),  v_j in d f(y_j, zeta_j),
// and sets x_{t+1} to the mean of y_0, ..., y_{j_t - 1}.
// stationarity[k] is |grad F_nu(x_t)| with nu = 1/(2 rho) when the problem
// exposes full_composite() (and nu rho(F) < 1), else the proxy
// 2 rho |x_t - x_{t+1}|. named_points holds "best" (lowest recorded
// stationarity, t >= 1) and "selected" (uniform over x_1..x_T).
SolverReport pgsg_run(const StochasticProblem& problem, const Vector& x0,
                      const PgsgSchedule& schedule, RandomStream& rng, const PgsgOptions& options);

}  // namespace proxkit
