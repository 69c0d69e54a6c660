#pragma once

#include <memory>

#include "proxkit/oracles.hpp"

namespace proxkit {

class ZeroFunction final : public ProxOracle {
 public:
  double value(const Vector&) const override { return 0.0; }
  Vector prox(double, const Vector& z) const override { return z; }
  Vector subgradient(const Vector& x) const override { return Vector::Zero(x.size()); }
  std::string name() const override { return "zero"; }
  std::optional<QuadraticForm> quadratic_form() const override { return QuadraticForm{}; }
};

// weight * |x|_1 on R^dim. dim only enters the Lipschitz constant.
class L1Norm final : public LipschitzConvex {
 public:
  L1Norm(double weight, std::size_t dim);
  double value(const Vector& x) const override;
  Vector prox(double nu, const Vector& z) const override;
  Vector subgradient(const Vector& x) const override;
  std::string name() const override { return "l1"; }
  double lipschitz() const override;
  double conjugate(const Vector& u) const override;
  Vector prox_conjugate(double sigma, const Vector& u) const override;
  std::optional<double> l1_weight() const override { return weight_; }
  double weight() const { return weight_; }

 private:
  double weight_;
  std::size_t dim_;
};

// weight * |x|_2.
class L2Norm final : public LipschitzConvex {
 public:
  explicit L2Norm(double weight = 1.0);
  double value(const Vector& x) const override;
  Vector prox(double nu, const Vector& z) const override;
  Vector subgradient(const Vector& x) const override;
  std::string name() const override { return "l2"; }
  double lipschitz() const override { return weight_; }
  double conjugate(const Vector& u) const override;
  Vector prox_conjugate(double sigma, const Vector& u) const override;

 private:
  double weight_;
};

// h(t) = t on R^1.
class Identity final : public LipschitzConvex {
 public:
  double value(const Vector& x) const override;
  Vector prox(double nu, const Vector& z) const override;
  Vector subgradient(const Vector& x) const override;
  std::string name() const override { return "identity"; }
  double lipschitz() const override { return 1.0; }
  double conjugate(const Vector& u) const override;
  Vector prox_conjugate(double sigma, const Vector& u) const override;
  std::optional<Vector> dual_singleton(std::size_t output_dim) const override;
};

// 1/2 |x|^2; convex with closed-form prox z / (1 + nu).
class HalfSquaredNorm final : public ProxOracle, public SubgradientOracle {
 public:
  double value(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector prox(double nu, const Vector& z) const override { return z / (1.0 + nu); }
  Vector subgradient(const Vector& x) const override { return x; }
  std::string name() const override { return "half_squared_norm"; }
  std::optional<QuadraticForm> quadratic_form() const override { return QuadraticForm{1.0, Vector()}; }
  double weak_convexity() const override { return 0.0; }
  double lipschitz() const override;
};

// Indicator of the box [lower, upper]; prox is the componentwise clamp.
class BoxIndicator final : public ProxOracle {
 public:
  BoxIndicator(Vector lower, Vector upper);
  double value(const Vector& x) const override;
  Vector prox(double nu, const Vector& z) const override;
  Vector subgradient(const Vector& x) const override { return Vector::Zero(x.size()); }
  std::string name() const override { return "box"; }
  Vector project(const Vector& z) const;
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  bool contains(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

// g(x) + |x - center|^2 / (2 nu): the objective-side term of a proximal
// subproblem. Its prox reduces to a prox of g at a shifted point.
class ShiftedQuadratic final : public ProxOracle {
 public:
  ShiftedQuadratic(std::shared_ptr<const ProxOracle> g, Vector center, double nu);
  double value(const Vector& x) const override;
  Vector prox(double t, const Vector& z) const override;
  Vector subgradient(const Vector& x) const override;
  std::string name() const override { return "shifted_quadratic(" + g_->name() + ")"; }
  std::optional<QuadraticForm> quadratic_form() const override;

 private:
  std::shared_ptr<const ProxOracle> g_;
  Vector center_;
  double nu_;
};

// F = g + h o c seen as a subgradient oracle with modulus L * beta.
class CompositeObjective final : public SubgradientOracle {
 public:
  explicit CompositeObjective(CompositeProblem problem) : problem_(std::move(problem)) {}
  double value(const Vector& x) const override { return problem_.value(x); }
  Vector subgradient(const Vector& x) const override;
  double weak_convexity() const override { return problem_.weak_convexity(); }
  double lipschitz() const override;

 private:
  CompositeProblem problem_;
};

// Scalar map c(x) = a x^2 + b on R^1 (jacobian 2 a x, beta = 2|a|).
class ScalarQuadraticMap final : public SmoothMap {
 public:
  ScalarQuadraticMap(double a, double b) : a_(a), b_(b) {}
  std::size_t input_dim() const override { return 1; }
  std::size_t output_dim() const override { return 1; }
  Vector eval(const Vector& x) const override;
  Vector jvp(const Vector& x, const Vector& v) const override;
  Vector vjp(const Vector& x, const Vector& u) const override;
  double beta() const override { return 2.0 * std::abs(a_); }

 private:
  double a_;
  double b_;
};

// |x^2 - 1| on R^1 as a composite problem (h = |.|, c = x^2 - 1, L = 1,
// beta = 2); 2-weakly convex.
CompositeProblem abs_square_minus_one();

}  // namespace proxkit
