#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "proxkit/numerics.hpp"
#include "proxkit/proxlinear.hpp"

namespace proxkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Pieces of the subproblem in the shifted variable w = x - y:
//   P(w) = g(y + w) + beta/2 |w|^2 + h(b + J w),  b = c(y).
struct Subproblem {
  const LocalModel& model;
  double beta;

  const ProxOracle& g() const { return *model.problem().g; }
  const LipschitzConvex& h() const { return *model.problem().h; }
  const SmoothMap& c() const { return *model.problem().c; }
  const Vector& y() const { return model.anchor(); }
  const Vector& b() const { return model.c_at_anchor(); }

  // argmin_w g(y + w) + beta/2 |w|^2 + <q, w>
  Vector best_response(const Vector& q) const { return g().prox(1.0 / beta, y() - q / beta) - y(); }
};

struct Evaluation {
  double value;
  double magnitude;  // sum of absolute term sizes, for the rounding floor
};

Evaluation primal(const Subproblem& s, const Vector& w, std::uint64_t& jvp_calls) {
  const double gv = s.g().value(s.y() + w);
  const double quad = 0.5 * s.beta * w.squaredNorm();
  ++jvp_calls;
  const Vector jw = s.c().jvp(s.y(), w);
  const double hv = s.h().value(s.b() + jw);
  // h is an absolute norm (or linear), so h(|b| + |Jw|) sizes the
  // cancellation inside b + Jw.
  const double spread = std::abs(s.h().value(s.b().cwiseAbs() + jw.cwiseAbs()));
  return {gv + quad + hv, std::abs(gv) + quad + std::max(std::abs(hv), spread)};
}

// D(u) = -h*(u) + <u, b> + min_w { g(y + w) + beta/2 |w|^2 + <J^T u, w> }
Evaluation dual(const Subproblem& s, const Vector& u, const Vector& jt_u, const Vector& w_u) {
  const double gv = s.g().value(s.y() + w_u);
  const double quad = 0.5 * s.beta * w_u.squaredNorm();
  const double lin = jt_u.dot(w_u);
  const double ub = u.dot(s.b());
  const double conj = s.h().conjugate(u);
  const double ub_abs = u.cwiseAbs().dot(s.b().cwiseAbs());
  const double lin_abs = jt_u.cwiseAbs().dot(w_u.cwiseAbs());
  return {-conj + ub + gv + quad + lin, ub_abs + std::abs(gv) + quad + lin_abs + std::abs(conj)};
}

// With h = lambda |.|_1 and g quadratic the subproblem reads
//   min_w Q/2 |w - w0|^2 + lambda |b + J w|_1.
// Guessing the zero residuals A and the signs sigma elsewhere, the
// minimizer is the projection of w0 - lambda J_N^T sigma / Q onto
// {w : J_A w = -b_A}. Candidates are accepted only through the gap.
class ActiveSetPolisher {
 public:
  struct Candidate {
    Vector w;
    Vector u;
    Vector multiplier;  // unclamped on A
  };

  static std::optional<ActiveSetPolisher> make(const Subproblem& s, std::uint64_t& jvp_calls) {
    const auto lambda = s.h().l1_weight();
    const auto quad = s.g().quadratic_form();
    if (!lambda || !quad || !(*lambda > 0.0)) return std::nullopt;
    const auto m = static_cast<Eigen::Index>(s.c().output_dim());
    const auto d = static_cast<Eigen::Index>(s.c().input_dim());
    ActiveSetPolisher p;
    p.lambda_ = *lambda;
    p.q_ = quad->curvature + s.beta;
    p.w0_ = Vector::Zero(d);
    if (quad->curvature > 0.0) {
      const Vector center = quad->center.size() ? quad->center : Vector::Zero(d);
      p.w0_ = quad->curvature * (center - s.y()) / p.q_;
    }
    p.b_ = s.b();
    p.j_.resize(m, d);
    Vector e = Vector::Zero(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      e[k] = 1.0;
      p.j_.col(k) = s.c().jvp(s.y(), e);
      e[k] = 0.0;
    }
    jvp_calls += static_cast<std::uint64_t>(d);
    p.c_ = p.b_ + p.j_ * p.w0_;
    p.row_sq_ = p.j_.rowwise().squaredNorm();
    return p;
  }

  // Exact coordinate maximization of the dual
  //   max_{|u| <= lambda} <u, b + J w0> - |J^T u|^2 / (2Q)
  // for `sweeps` passes; returns the primal point w0 - J^T u / Q.
  Vector ascend(Vector& u, std::size_t sweeps) const {
    Vector v = j_.transpose() * u;
    for (std::size_t pass = 0; pass < sweeps; ++pass) {
      for (Eigen::Index i = 0; i < j_.rows(); ++i) {
        if (row_sq_[i] == 0.0) continue;
        const double grad = c_[i] - j_.row(i).dot(v) / q_;
        const double next = std::clamp(u[i] + q_ * grad / row_sq_[i], -lambda_, lambda_);
        const double delta = next - u[i];
        if (delta == 0.0) continue;
        u[i] = next;
        v += delta * j_.row(i).transpose();
      }
    }
    return w0_ - v / q_;
  }

  // Primal active-set method: keep residuals in A at zero and the signs of
  // the others fixed, step toward the minimizer of that quadratic piece,
  // stop at the first residual that reaches zero (it joins A), and release
  // members of A whose multipliers leave [-lambda, lambda].
  std::optional<Candidate> active_set(Vector w, std::size_t max_steps) const {
    const Eigen::Index m = j_.rows();
    std::vector<char> active(static_cast<std::size_t>(m), 0);
    Vector sigma(m);
    Vector r = b_ + j_ * w;
    for (Eigen::Index i = 0; i < m; ++i) sigma[i] = r[i] >= 0.0 ? 1.0 : -1.0;
    const double drop_tol = 1e-12 * lambda_;
    for (std::size_t step = 0; step < max_steps; ++step) {
      const Candidate target = solve(active, sigma);
      const Vector dir = target.w - w;
      const Vector jd = j_ * dir;
      double t = 1.0;
      Eigen::Index hit = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (active[static_cast<std::size_t>(i)] || sigma[i] * jd[i] >= 0.0) continue;
        const double ti = std::max(-r[i] / jd[i], 0.0);
        if (ti < t) {
          t = ti;
          hit = i;
        }
      }
      w += t * dir;
      r = b_ + j_ * w;
      if (hit >= 0) {
        active[static_cast<std::size_t>(hit)] = 1;
        continue;
      }
      Eigen::Index worst = -1;
      double excess = drop_tol;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        const double e = std::abs(target.multiplier[i]) - lambda_;
        if (e > excess) {
          excess = e;
          worst = i;
        }
      }
      if (worst < 0) return Candidate{w, target.u, target.multiplier};
      active[static_cast<std::size_t>(worst)] = 0;
      sigma[worst] = target.multiplier[worst] >= 0.0 ? 1.0 : -1.0;
    }
    return std::nullopt;
  }

  // One augmented Lagrangian pass on the split z = b + J w: minimize
  //   Q/2 |w - w0|^2 + sum_i huber_sigma(b_i + J_i w + u_i / sigma)
  // by semismooth Newton, then u <- clamp(sigma a, -lambda, lambda).
  // The generalized Hessian Q I + sigma J_S^T J_S stays positive definite
  // however many residuals vanish together.
  void augmented_lagrangian(Vector& w, Vector& u, double sigma) const {
    const double cut = lambda_ / sigma;
    auto merit = [&](const Vector& x) {
      const Vector a = b_ + j_ * x + u / sigma;
      double total = 0.5 * q_ * (x - w0_).squaredNorm();
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double e = std::abs(a[i]);
        total += e <= cut ? 0.5 * sigma * e * e : lambda_ * e - 0.5 * lambda_ * cut;
      }
      return total;
    };
    for (int it = 0; it < 50; ++it) {
      const Vector a = b_ + j_ * w + u / sigma;
      Vector dual = (sigma * a).cwiseMax(-lambda_).cwiseMin(lambda_);
      const Vector grad = q_ * (w - w0_) + j_.transpose() * dual;
      if (grad.norm() <= 1e-15 * (1.0 + q_ * (w - w0_).norm() + (j_.transpose() * dual).norm())) break;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(j_.cols(), j_.cols()) * q_;
      for (Eigen::Index i = 0; i < a.size(); ++i)
        if (std::abs(a[i]) < cut) hess.selfadjointView<Eigen::Lower>().rankUpdate(j_.row(i).transpose(), sigma);
      const Vector step = hess.selfadjointView<Eigen::Lower>().ldlt().solve(-grad);
      const double f0 = merit(w);
      const double slope = grad.dot(step);
      double t = 1.0;
      while (t > 1e-10 && merit(w + t * step) > f0 + 1e-4 * t * slope) t *= 0.5;
      if (t <= 1e-10) break;
      w += t * step;
    }
    u = (sigma * (b_ + j_ * w + u / sigma)).cwiseMax(-lambda_).cwiseMin(lambda_);
  }

  double sigma_start() const { return q_ / std::max(row_sq_.maxCoeff(), 1e-300); }

  std::vector<Candidate> candidates(const Vector& w, const Vector& u) const {
    const Vector r = b_ + j_ * w;
    const double interior = lambda_ * (1.0 - 1e-6);
    const double small = 1e-9 * (1.0 + r.cwiseAbs().maxCoeff());
    std::vector<char> by_dual(r.size()), by_residual(r.size()), either(r.size());
    Vector sign_dual(r.size()), sign_res(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      by_dual[i] = std::abs(u[i]) < interior;
      by_residual[i] = std::abs(r[i]) <= small;
      either[i] = by_dual[i] || by_residual[i];
      sign_res[i] = r[i] >= 0.0 ? 1.0 : -1.0;
      sign_dual[i] = u[i] >= 0.0 ? 1.0 : -1.0;
    }
    std::vector<Candidate> out;
    out.push_back(solve(by_dual, sign_dual));
    out.push_back(solve(by_residual, sign_res));
    out.push_back(solve(either, sign_dual));
    return out;
  }

 private:
  Candidate solve(const std::vector<char>& active, const Vector& sigma) const {
    std::vector<Eigen::Index> a;
    Vector w1 = w0_;
    for (Eigen::Index i = 0; i < j_.rows(); ++i) {
      if (active[i])
        a.push_back(i);
      else
        w1 -= (lambda_ * sigma[i] / q_) * j_.row(i).transpose();
    }
    Candidate c;
    c.u.resize(j_.rows());
    for (Eigen::Index i = 0; i < j_.rows(); ++i) c.u[i] = lambda_ * sigma[i];
    c.multiplier = c.u;
    if (a.empty()) {
      c.w = w1;
      return c;
    }
    const auto na = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd ja(na, j_.cols());
    Vector t(na);
    for (Eigen::Index k = 0; k < na; ++k) {
      ja.row(k) = j_.row(a[static_cast<std::size_t>(k)]);
      t[k] = b_[a[static_cast<std::size_t>(k)]];
    }
    t += ja * w1;
    // mu = (J_A J_A^T)^+ t through pseudo-inverses of J_A and J_A^T, with
    // one refinement pass on the constraint residual.
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ja);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_t(ja.transpose());
    Vector shift = cod.solve(t);
    c.w = w1 - shift;
    Vector fix(na);
    for (Eigen::Index k = 0; k < na; ++k) fix[k] = b_[a[static_cast<std::size_t>(k)]];
    fix += ja * c.w;
    const Vector extra = cod.solve(fix);
    c.w -= extra;
    shift += extra;
    const Vector mu = cod_t.solve(shift);
    for (Eigen::Index k = 0; k < na; ++k) {
      const auto i = a[static_cast<std::size_t>(k)];
      c.multiplier[i] = q_ * mu[k];
      c.u[i] = std::clamp(c.multiplier[i], -lambda_, lambda_);
    }
    return c;
  }

  Matrix j_;
  double lambda_ = 0.0;
  double q_ = 0.0;
  Vector w0_;
  Vector b_;
  Vector c_;
  Vector row_sq_;
};

}  // namespace

SaddleResult solve_linearized_subproblem(const LocalModel& model, double beta,
                                         const SaddleOptions& options, const Vector* warm_dual) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_linearized_subproblem: beta must be positive");
  const Subproblem s{model, beta};
  const auto m = static_cast<Eigen::Index>(s.c().output_dim());
  const auto d = static_cast<Eigen::Index>(s.c().input_dim());
  SaddleResult result;

  auto finish_exact = [&](const Vector& u) {
    ++result.vjp_calls;
    const Vector jt_u = s.c().vjp(s.y(), u);
    const Vector w = s.best_response(jt_u);
    const Evaluation p = primal(s, w, result.jvp_calls);
    const Evaluation dv = dual(s, u, jt_u, w);
    result.x = s.y() + w;
    result.dual = u;
    result.primal_value = p.value;
    result.gap = std::max(p.value - dv.value, 0.0);
    result.converged = true;
    return result;
  };

  // h linear: the dual is pinned and one prox solves the subproblem.
  if (auto u = s.h().dual_singleton(static_cast<std::size_t>(m))) return finish_exact(*u);

  Vector u = (warm_dual && warm_dual->size() == m) ? *warm_dual : Vector::Zero(m);
  u = s.h().prox_conjugate(1.0, u);
  const std::size_t check_every = std::max<std::size_t>(options.check_every, 1);

  struct Certificate {
    double gap;
    double floor;
    double primal;
  };
  auto certify = [&](const Vector& w, const Vector& u_feasible) {
    ++result.vjp_calls;
    const Vector jt = s.c().vjp(s.y(), u_feasible);
    const Evaluation p = primal(s, w, result.jvp_calls);
    const Evaluation dv = dual(s, u_feasible, jt, s.best_response(jt));
    return Certificate{std::max(p.value - dv.value, 0.0), 64.0 * kEps * std::max(p.magnitude, dv.magnitude),
                       p.value};
  };
  auto accept = [&](const Vector& w, const Vector& u_feasible, const Certificate& c, std::size_t iters) {
    result.x = s.y() + w;
    result.dual = u_feasible;
    result.gap = c.gap;
    result.primal_value = c.primal;
    result.iterations = iters;
    result.converged = c.gap <= options.gap_tol || c.gap <= c.floor;
    return result;
  };

  // h = lambda |.|_1 with quadratic g: dual coordinate ascent, with an
  // active-set solve attempted at every check.
  if (const auto polisher = ActiveSetPolisher::make(s, result.jvp_calls)) {
    Vector w = polisher->ascend(u, 0);
    const auto exact = polisher->active_set(w, 20 * static_cast<std::size_t>(m + d));
    if (exact) {
      const Certificate c = certify(exact->w, exact->u);
      if (c.gap <= options.gap_tol || c.gap <= c.floor) return accept(exact->w, exact->u, c, 0);
    }
    // Exact fallback for degenerate vertices where the active set cycles.
    {
      Vector wa = w, ua = u;
      double sigma = polisher->sigma_start();
      for (std::size_t pass = 0; pass < 40; ++pass, sigma *= 4.0) {
        polisher->augmented_lagrangian(wa, ua, sigma);
        const Certificate c = certify(wa, ua);
        if (c.gap <= options.gap_tol || c.gap <= c.floor) return accept(wa, ua, c, pass + 1);
      }
    }
    Vector w_prev = w;
    Certificate best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    Vector best_w = w;
    Vector best_u = u;
    std::size_t k = 0;
    while (true) {
      for (const auto& cand : polisher->candidates(w, u)) {
        const Certificate c = certify(cand.w, cand.u);
        if (c.gap <= options.gap_tol || c.gap <= c.floor) return accept(cand.w, cand.u, c, k);
      }
      const Certificate c = certify(w, u);
      if (c.gap < best.gap) {
        best = c;
        best_w = w;
        best_u = u;
      }
      const bool stalled = k > 0 && (w - w_prev).norm() <= 1e-14 * (1.0 + w.norm());
      if (c.gap <= options.gap_tol || (c.gap <= c.floor && stalled)) return accept(w, u, c, k);
      if (k >= options.max_iters) break;
      const std::size_t sweeps = std::min(check_every, options.max_iters - k);
      w_prev = w;
      w = polisher->ascend(u, sweeps);
      k += sweeps;
      result.jvp_calls += sweeps;
      result.vjp_calls += sweeps;
    }
    accept(best_w, best_u, best, k);
    result.converged = false;
    return result;
  }

  const double jnorm = 1.02 * jacobian_norm_estimate(s.c(), s.y(), options.power_iters);
  result.jvp_calls += static_cast<std::uint64_t>(options.power_iters) + 1;
  result.vjp_calls += static_cast<std::uint64_t>(options.power_iters) + 1;
  if (jnorm == 0.0) return finish_exact(s.h().subgradient(s.b()));

  // tau * sigma * |J|^2 = 0.95; the primal weight omega sets tau / sigma.
  double omega = options.primal_weight;
  if (!(omega > 0.0)) omega = std::clamp(jnorm / beta, 1e-3, 1e3);
  const double tau = omega / jnorm;
  const double sigma = 0.95 / (omega * jnorm);
  const double s_prox = 1.0 / (beta + 1.0 / tau);

  Vector w = Vector::Zero(d);
  Vector w_bar = w;
  Vector jt_u = s.c().vjp(s.y(), u);
  ++result.vjp_calls;

  Vector best_w = w;
  double best_primal = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();

  std::size_t k = 0;
  while (k < options.max_iters) {
    ++result.jvp_calls;
    u = s.h().prox_conjugate(sigma, u + sigma * (s.b() + s.c().jvp(s.y(), w_bar)));
    ++result.vjp_calls;
    jt_u = s.c().vjp(s.y(), u);
    const Vector v = w - tau * jt_u;
    const Vector w_next = s.g().prox(s_prox, s.y() + (s_prox / tau) * v) - s.y();
    w_bar = 2.0 * w_next - w;
    const double step = (w_next - w).norm();
    w = w_next;
    ++k;

    if (k % check_every == 0 || k == options.max_iters) {
      const Evaluation p = primal(s, w, result.jvp_calls);
      const Vector w_u = s.best_response(jt_u);
      const Evaluation pu = primal(s, w_u, result.jvp_calls);
      const Evaluation dv = dual(s, u, jt_u, w_u);
      if (p.value < best_primal) {
        best_primal = p.value;
        best_w = w;
      }
      if (pu.value < best_primal) {
        best_primal = pu.value;
        best_w = w_u;
      }
      gap = std::max(best_primal - dv.value, 0.0);
      const double floor = 64.0 * kEps * std::max({p.magnitude, pu.magnitude, dv.magnitude});
      // Below the rounding floor the gap stops informing; wait for the
      // iterates to stall instead.
      if (gap <= options.gap_tol ||
          (gap <= floor && step <= 1e-14 * (1.0 + w.norm()))) {
        result.converged = true;
        break;
      }
    }
  }

  result.x = s.y() + best_w;
  result.dual = u;
  result.gap = gap;
  result.primal_value = best_primal;
  result.iterations = k;
  return result;
}

}  // namespace proxkit
