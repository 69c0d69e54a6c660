#include "proxkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "proxkit/errors.hpp"

namespace proxkit {

double default_fd_step(const Vector& x) {
  const double inf_norm = x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  return 1e-5 * (1.0 + inf_norm);
}

Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be positive");
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw ProbeFailure("finite_difference_gradient: non-finite value probing coordinate " +
                         std::to_string(i));
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

Vector finite_difference_gradient(const ScalarFunction& f, const Vector& x) {
  return finite_difference_gradient(f, x, default_fd_step(x));
}

namespace {

Vector random_point(RandomStream& rng, std::size_t dim) {
  const double scale = std::pow(10.0, rng.uniform(-3.0, 1.0));
  Vector v(static_cast<Eigen::Index>(dim));
  for (auto& e : v) e = scale * rng.normal();
  return v;
}

}  // namespace

WeakConvexityReport check_weak_convexity(const SubgradientOracle& f, double rho, std::size_t dim,
                                         RandomStream& sampler, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("check_weak_convexity: trials must be >= 1");
  WeakConvexityReport report;
  report.trials = trials;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  auto phi = [&](const Vector& z, double fz) { return fz + 0.5 * rho * z.squaredNorm(); };

  for (std::size_t k = 0; k < trials; ++k) {
    const Vector x = random_point(sampler, dim);
    const Vector y = x + random_point(sampler, dim);
    const double fx = f.value(x);
    const double fy = f.value(y);

    // midpoint convexity of f + rho/2 |.|^2
    const Vector mid = 0.5 * (x + y);
    const double fmid = f.value(mid);
    const double mid_gap =
        (phi(mid, fmid) - 0.5 * (phi(x, fx) + phi(y, fy))) / (1.0 + std::abs(fmid));

    // subgradient inequality at x
    const Vector v = f.subgradient(x);
    const double lower = fx + v.dot(y - x) - 0.5 * rho * (y - x).squaredNorm();
    const double sub_gap = (lower - fy) / (1.0 + std::abs(fy));

    for (double gap : {mid_gap, sub_gap}) {
      report.worst_gap = std::max(report.worst_gap, gap);
      if (gap > 1e-8) ++report.violations;
    }
  }
  return report;
}

AdjointReport check_adjoint(const SmoothMap& c, RandomStream& sampler, std::size_t trials) {
  AdjointReport report;
  report.trials = trials;
  const auto d = static_cast<Eigen::Index>(c.input_dim());
  const auto m = static_cast<Eigen::Index>(c.output_dim());
  for (std::size_t k = 0; k < trials; ++k) {
    Vector x(d), v(d), u(m);
    for (auto& e : x) e = sampler.normal();
    for (auto& e : v) e = sampler.normal();
    for (auto& e : u) e = sampler.normal();
    const double lhs = u.dot(c.jvp(x, v));
    const double rhs = c.vjp(x, u).dot(v);
    report.worst_relative_error =
        std::max(report.worst_relative_error, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  return report;
}

double power_iteration(const std::function<Vector(const Vector&)>& apply, std::size_t dim,
                       int iterations) {
  const auto n = static_cast<Eigen::Index>(dim);
  if (n == 0) return 0.0;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Vector w = apply(v);
    lambda = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  return std::max(lambda, v.dot(apply(v)));
}

double jacobian_norm_estimate(const SmoothMap& c, const Vector& x, int iterations) {
  const double lambda = power_iteration([&](const Vector& v) { return c.vjp(x, c.jvp(x, v)); },
                                        c.input_dim(), iterations);
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace proxkit
