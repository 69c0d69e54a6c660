#include "proxkit/functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Vector LipschitzConvex::prox_conjugate(double sigma, const Vector& u) const {
  return u - sigma * prox(1.0 / sigma, u / sigma);
}

std::optional<Vector> LipschitzConvex::dual_singleton(std::size_t) const { return std::nullopt; }

L1Norm::L1Norm(double weight, std::size_t dim) : weight_(weight), dim_(dim) {
  if (!(weight >= 0.0)) throw std::invalid_argument("L1Norm: weight must be nonnegative");
}

double L1Norm::value(const Vector& x) const { return weight_ * x.lpNorm<1>(); }

Vector L1Norm::prox(double nu, const Vector& z) const {
  const double t = nu * weight_;
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]) - t;
    out[i] = a > 0.0 ? sign(z[i]) * a : 0.0;
  }
  return out;
}

Vector L1Norm::subgradient(const Vector& x) const {
  return weight_ * x.unaryExpr([](double v) { return sign(v); });
}

double L1Norm::lipschitz() const { return weight_ * std::sqrt(static_cast<double>(dim_)); }

double L1Norm::conjugate(const Vector& u) const {
  return u.size() == 0 || u.lpNorm<Eigen::Infinity>() <= weight_ ? 0.0 : kInf;
}

Vector L1Norm::prox_conjugate(double, const Vector& u) const {
  return u.cwiseMax(-weight_).cwiseMin(weight_);
}

L2Norm::L2Norm(double weight) : weight_(weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("L2Norm: weight must be nonnegative");
}

double L2Norm::value(const Vector& x) const { return weight_ * x.norm(); }

Vector L2Norm::prox(double nu, const Vector& z) const {
  const double n = z.norm();
  const double t = nu * weight_;
  if (n <= t) return Vector::Zero(z.size());
  return (1.0 - t / n) * z;
}

Vector L2Norm::subgradient(const Vector& x) const {
  const double n = x.norm();
  if (n == 0.0) return Vector::Zero(x.size());
  return (weight_ / n) * x;
}

double L2Norm::conjugate(const Vector& u) const { return u.norm() <= weight_ * (1.0 + 1e-15) ? 0.0 : kInf; }

Vector L2Norm::prox_conjugate(double, const Vector& u) const {
  const double n = u.norm();
  if (n <= weight_) return u;
  return (weight_ / n) * u;
}

double Identity::value(const Vector& x) const {
  if (x.size() != 1) throw std::invalid_argument("Identity: expects a scalar argument");
  return x[0];
}

Vector Identity::prox(double nu, const Vector& z) const { return z.array() - nu; }

Vector Identity::subgradient(const Vector& x) const { return Vector::Ones(x.size()); }

double Identity::conjugate(const Vector& u) const {
  return (u.size() == 1 && u[0] == 1.0) ? 0.0 : kInf;
}

Vector Identity::prox_conjugate(double, const Vector& u) const { return Vector::Ones(u.size()); }

std::optional<Vector> Identity::dual_singleton(std::size_t output_dim) const {
  return Vector::Ones(static_cast<Eigen::Index>(output_dim));
}

double HalfSquaredNorm::lipschitz() const { return kInf; }

BoxIndicator::BoxIndicator(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_same_dim(lower_, upper_, "BoxIndicator");
  if ((lower_.array() > upper_.array()).any()) throw std::invalid_argument("BoxIndicator: lower > upper");
}

bool BoxIndicator::contains(const Vector& x) const {
  return x.size() == lower_.size() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

double BoxIndicator::value(const Vector& x) const { return contains(x) ? 0.0 : kInf; }

Vector BoxIndicator::project(const Vector& z) const {
  require_same_dim(z, lower_, "BoxIndicator::project");
  return z.cwiseMax(lower_).cwiseMin(upper_);
}

Vector BoxIndicator::prox(double, const Vector& z) const { return project(z); }

ShiftedQuadratic::ShiftedQuadratic(std::shared_ptr<const ProxOracle> g, Vector center, double nu)
    : g_(std::move(g)), center_(std::move(center)), nu_(nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("ShiftedQuadratic: nu must be positive");
}

double ShiftedQuadratic::value(const Vector& x) const {
  return g_->value(x) + (x - center_).squaredNorm() / (2.0 * nu_);
}

Vector ShiftedQuadratic::prox(double t, const Vector& z) const {
  // argmin g(x) + |x - c|^2/(2 nu) + |x - z|^2/(2 t)
  const double s = 1.0 / (1.0 / t + 1.0 / nu_);
  return g_->prox(s, s * (z / t + center_ / nu_));
}

std::optional<QuadraticForm> ShiftedQuadratic::quadratic_form() const {
  const auto inner = g_->quadratic_form();
  if (!inner) return std::nullopt;
  QuadraticForm out;
  out.curvature = inner->curvature + 1.0 / nu_;
  const Vector inner_center = inner->center.size() ? inner->center : Vector::Zero(center_.size());
  out.center = (inner->curvature * inner_center + center_ / nu_) / out.curvature;
  return out;
}

Vector ShiftedQuadratic::subgradient(const Vector& x) const {
  return g_->subgradient(x) + (x - center_) / nu_;
}

Vector CompositeObjective::subgradient(const Vector& x) const {
  const Vector cx = problem_.c->eval(x);
  return problem_.g->subgradient(x) + problem_.c->vjp(x, problem_.h->subgradient(cx));
}

double CompositeObjective::lipschitz() const { return kInf; }

Vector ScalarQuadraticMap::eval(const Vector& x) const {
  Vector out(1);
  out[0] = a_ * x[0] * x[0] + b_;
  return out;
}

Vector ScalarQuadraticMap::jvp(const Vector& x, const Vector& v) const {
  Vector out(1);
  out[0] = 2.0 * a_ * x[0] * v[0];
  return out;
}

Vector ScalarQuadraticMap::vjp(const Vector& x, const Vector& u) const {
  Vector out(1);
  out[0] = 2.0 * a_ * x[0] * u[0];
  return out;
}

CompositeProblem abs_square_minus_one() {
  CompositeProblem p;
  p.g = std::make_shared<ZeroFunction>();
  p.h = std::make_shared<L1Norm>(1.0, 1);
  p.c = std::make_shared<ScalarQuadraticMap>(1.0, -1.0);
  p.L = 1.0;
  p.beta = 2.0;
  return p;
}

}  // namespace proxkit
