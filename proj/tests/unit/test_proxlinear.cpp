#include <doctest.h>

#include <cmath>
#include <vector>

#include "proxkit/functions.hpp"
#include "proxkit/moreau.hpp"
#include "proxkit/problems.hpp"
#include "proxkit/proxlinear.hpp"

using namespace proxkit;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

Vector normal_vector(RandomStream& rng, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& e : v) e = rng.normal();
  return v;
}

CompositeProblem half_square_identity() {
  CompositeProblem p;
  p.g = std::make_shared<ZeroFunction>();
  p.h = std::make_shared<Identity>();
  p.c = std::make_shared<ScalarQuadraticMap>(0.5, 0.0);
  p.L = 1.0;
  p.beta = 1.0;
  return p;
}

Vector soft(const Vector& v, double t) {
  return v.unaryExpr([t](double e) { return sign(e) * std::max(std::abs(e) - t, 0.0); });
}

}  // namespace

TEST_CASE("model value") {
  SUBCASE("exact at the anchor") {
    const auto inst = make_phase_retrieval(6, 40, 0.1, 2);
    RandomStream rng(2, 2);
    for (int k = 0; k < 20; ++k) {
      const Vector y = normal_vector(rng, 6);
      CHECK(model_value(*inst.composite, y, y) == inst.composite->value(y));
    }
  }
  SUBCASE("scalar linearization") {
    CHECK(model_value(half_square_identity(), scalar(1.0), scalar(3.0)) == doctest::Approx(2.5));
    const LocalModel model(half_square_identity(), scalar(1.0));
    CHECK(model.c_at_anchor()[0] == 0.5);
    CHECK(model.linearized_map(scalar(3.0))[0] == doctest::Approx(2.5));
  }
  SUBCASE("two-sided model error on phase retrieval") {
    const auto inst = make_phase_retrieval(6, 40, 0.1, 3);
    const CompositeProblem& p = *inst.composite;
    const double lb = p.L * p.beta;
    RandomStream rng(3, 2);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      const Vector y = normal_vector(rng, 6);
      const Vector x = y + rng.uniform(0.01, 2.0) * normal_vector(rng, 6);
      const double slack = 0.5 * lb * (x - y).squaredNorm() + 1e-12 * (1 + std::abs(p.value(x)));
      const double mv = model_value(p, y, x);
      if (mv < p.value(x) - slack || mv > p.value(x) + slack) ++bad;
    }
    CHECK(bad == 0);
  }
  SUBCASE("model is convex in x") {
    const auto inst = make_z2_sync(6, 0.8, 0.1, 4);
    const CompositeProblem& p = *inst.composite;
    RandomStream rng(4, 2);
    for (int k = 0; k < 200; ++k) {
      const Vector y = normal_vector(rng, 6), a = normal_vector(rng, 6), b = normal_vector(rng, 6);
      const double mid = model_value(p, y, 0.5 * (a + b));
      CHECK(mid <= 0.5 * (model_value(p, y, a) + model_value(p, y, b)) + 1e-12);
    }
  }
}

TEST_CASE("prox-linear step on |x^2 - 1|") {
  const CompositeProblem f = abs_square_minus_one();
  SUBCASE("stationary anchor") {
    const ProxLinearStep step = proxlinear_step(f, scalar(1.0), 2.0, 1e-12);
    CHECK(step.x_next[0] == doctest::Approx(1.0));
    CHECK(step.surrogate.norm <= 1e-10);
  }
  SUBCASE("anchor 2 against a grid") {
    // min |3 + 4 (x - 2)| + (x - 2)^2 over x.
    const ProxLinearStep step = proxlinear_step(f, scalar(2.0), 2.0, 1e-12);
    double best = -1.0, best_v = INFINITY;
    for (long k = 0; k <= 6000000; ++k) {
      const double x = -1.0 + 1e-6 * static_cast<double>(k);
      const double v = std::abs(3.0 + 4.0 * (x - 2.0)) + (x - 2.0) * (x - 2.0);
      if (v < best_v) {
        best_v = v;
        best = x;
      }
    }
    CHECK(step.x_next[0] == doctest::Approx(best).epsilon(1e-6));
    CHECK(step.surrogate.beta_used == 2.0);
    CHECK(step.surrogate.g_vec[0] == doctest::Approx(2.0 * (step.x_next[0] - 2.0)));
  }
}

TEST_CASE("additive composite step is a proximal gradient step") {
  const auto inst = make_lasso(20, 40, 0.2, 6);
  const CompositeProblem& p = *inst.composite;
  const Matrix a = inst.data.array("A").as_matrix();
  const Vector b = inst.data.array("b").as_vector();
  const double beta = p.L * p.beta;
  RandomStream rng(6, 2);
  for (int k = 0; k < 10; ++k) {
    const Vector x = normal_vector(rng, 20);
    const ProxLinearStep step = proxlinear_step(p, x, beta, 1e-12);
    const Vector expected = soft(x - a.transpose() * (a * x - b) / beta, 0.2 / beta);
    CHECK((step.x_next - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((step.surrogate.g_vec - beta * (step.x_next - x)).norm() <= 1e-12 * (1 + step.surrogate.norm));
  }
}

TEST_CASE("certified subproblem solves") {
  SUBCASE("l1 outer function") {
    const auto inst = make_phase_retrieval(8, 60, 0.1, 7);
    const CompositeProblem& p = *inst.composite;
    RandomStream rng(7, 2);
    for (int k = 0; k < 10; ++k) {
      const LocalModel model(p, normal_vector(rng, 8));
      SaddleOptions opts;
      opts.gap_tol = 1e-10;
      const SaddleResult r = solve_linearized_subproblem(model, p.L * p.beta, opts);
      CHECK(r.converged);
      CHECK(r.gap <= 1e-10);
      CHECK(r.dual.size() == 60);
    }
  }
  SUBCASE("l2 outer function over a box") {
    const auto inst = make_box_nls(6, 8, 8);
    const CompositeProblem& p = *inst.composite;
    RandomStream rng(8, 2);
    const Vector truth = *inst.ground_truth;
    for (int k = 0; k < 5; ++k) {
      const LocalModel model(p, truth + 0.1 * normal_vector(rng, 6));
      SaddleOptions opts;
      opts.gap_tol = 1e-8;
      const SaddleResult r = solve_linearized_subproblem(model, p.L * p.beta, opts);
      CHECK(r.converged);
      CHECK(r.gap <= 1e-8);
      const double objective =
          model.value(r.x) + 0.5 * p.L * p.beta * (r.x - model.anchor()).squaredNorm();
      CHECK(objective == doctest::Approx(r.primal_value).epsilon(1e-10));
    }
  }
}

TEST_CASE("degenerate l1 subproblems near a sharp minimizer") {
  // Many more residuals vanish together than there are variables.
  const auto inst = make_z2_sync(30, 0.5, 0.05, 1);
  const CompositeProblem& p = *inst.composite;
  RandomStream rng(13, 2);
  for (int k = 0; k < 3; ++k) {
    const Vector y = *inst.ground_truth + 0.01 * normal_vector(rng, 30);
    const LocalModel model(p, y);
    SaddleOptions opts;
    opts.gap_tol = 1e-10;
    const SaddleResult r = solve_linearized_subproblem(model, p.L * p.beta, opts);
    CHECK(r.converged);
    CHECK(r.gap <= 1e-10);
    CHECK(r.dual.lpNorm<Eigen::Infinity>() <= 1.0);
  }
  // This start walks into a vertex where the plain active-set method cycles.
  ProxLinearOptions o;
  o.outer_iters = 100;
  o.stat_tol = 1e-8;
  o.inner_tol = 1e-10;
  RandomStream init(1, 2);
  const SolverReport run = proxlinear_run(p, normal_vector(init, 30), o);
  CHECK(run.status == "converged");
}

TEST_CASE("prox-linear descent with exact solves") {
  const auto inst = make_phase_retrieval(8, 60, 0.1, 9);
  const CompositeProblem& p = *inst.composite;
  const double beta = p.L * p.beta;
  RandomStream rng(9, 2);
  for (int k = 0; k < 20; ++k) {
    const Vector x = normal_vector(rng, 8);
    const ProxLinearStep step = proxlinear_step(p, x, beta, 1e-12);
    CHECK(p.value(step.x_next) + 0.5 * beta * (step.x_next - x).squaredNorm() <= p.value(x) + 1e-9);
  }
}

TEST_CASE("prox-linear run") {
  SUBCASE("stationary start returns immediately") {
    ProxLinearOptions o;
    o.stat_tol = 1e-8;
    const SolverReport r = proxlinear_run(abs_square_minus_one(), scalar(1.0), o);
    CHECK(r.size() == 1);
    CHECK(r.status == "converged");
  }
  SUBCASE("lasso history is linear") {
    const auto inst = make_lasso(30, 60, 0.1, 10);
    ProxLinearOptions o;
    o.outer_iters = 200;
    o.stat_tol = 1e-9;
    const SolverReport r = proxlinear_run(*inst.composite, Vector::Zero(30), o);
    CHECK(r.consistent());
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(r.objective[k] <= r.objective[k - 1] + 1e-12);
    const RateEstimate est = estimate_local_rate(r.stationarity);
    CHECK(est.kind == RateEstimate::Kind::linear);
    CHECK(est.rate >= 0.0);
    CHECK(est.rate < 1.0);
  }
  SUBCASE("digit doubling near a sharp minimum") {
    const auto inst = make_phase_retrieval(20, 160, 0.0, 11);
    const Vector truth = *inst.ground_truth;
    RandomStream rng(11, 2);
    const Vector u = normal_vector(rng, 20);
    ProxLinearOptions o;
    o.outer_iters = 10;
    o.stat_tol = 1e-9;
    o.inner_tol = 1e-20;
    const SolverReport r = proxlinear_run(*inst.composite, truth + 0.1 * u / u.norm(), o);
    REQUIRE(r.size() >= 4);
    CHECK(estimate_local_rate(r.stationarity).kind == RateEstimate::Kind::quadratic);
    CHECK(std::min((r.final_point - truth).norm(), (r.final_point + truth).norm()) <= 1e-10);
  }
}

TEST_CASE("surrogate sandwiches the envelope gradient") {
  const auto inst = make_z2_sync(8, 0.7, 0.1, 12);
  const CompositeProblem& p = *inst.composite;
  const double beta = p.L * p.beta;
  RandomStream rng(12, 2);
  for (int k = 0; k < 20; ++k) {
    const Vector x = normal_vector(rng, 8);
    const double g = proxlinear_step(p, x, beta, 1e-12, 2000000).surrogate.norm;
    const double e = prox_map(p, 1.0 / (2.0 * beta), x, {1e-9, 20000}).envelope_gradient.norm();
    CHECK(0.25 * e <= g + 1e-6);
    CHECK(g <= 3.0 * e + 1e-6);
  }
}

TEST_CASE("local rate classification") {
  const std::vector<double> quad = {1e-1, 1e-2, 1e-4, 1e-8};
  CHECK(estimate_local_rate(quad).kind == RateEstimate::Kind::quadratic);

  const std::vector<double> geo = {1, 0.5, 0.25, 0.125, 0.0625};
  const RateEstimate est = estimate_local_rate(geo);
  CHECK(est.kind == RateEstimate::Kind::linear);
  CHECK(est.rate == doctest::Approx(0.5));
  CHECK(est.r_squared == doctest::Approx(1.0));

  const std::vector<double> noise = {1, 0.2, 0.9, 0.1, 0.8, 0.3, 0.7, 0.2};
  CHECK(estimate_local_rate(noise).kind == RateEstimate::Kind::undetermined);

  const std::vector<double> trailing = {1e-1, 1e-2, 1e-4, 1e-8, 0.0};
  CHECK(estimate_local_rate(trailing).kind == RateEstimate::Kind::quadratic);

  const std::vector<double> short_history = {1, 0.5, 0.25};
  CHECK_THROWS_AS(estimate_local_rate(short_history), std::invalid_argument);
  CHECK(to_string(RateEstimate::Kind::linear) == "linear");
}
