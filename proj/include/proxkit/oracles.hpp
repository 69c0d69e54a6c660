#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "proxkit/vector.hpp"

namespace proxkit {

// g(x) = curvature/2 |x - center|^2; an empty center means the origin.
struct QuadraticForm {
  double curvature = 0.0;
  Vector center;
};

// Closed convex function with an efficiently computable proximal map
//   prox(nu, z) = argmin_x { value(x) + |x - z|^2 / (2 nu) }.
// value() may return +inf outside the domain (indicators).
class ProxOracle {
 public:
  virtual ~ProxOracle() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector prox(double nu, const Vector& z) const = 0;
  // Some element of the subdifferential at a point of the domain.
  virtual Vector subgradient(const Vector& x) const = 0;
  virtual std::string name() const = 0;
  // Set when the function is an isotropic quadratic (including zero).
  virtual std::optional<QuadraticForm> quadratic_form() const { return std::nullopt; }
};

// rho-weakly convex function with a subgradient oracle:
//   f(y) >= f(x) + <v, y - x> - rho/2 |y - x|^2   for v = subgradient(x).
// lipschitz() may be +inf for functions that are only locally Lipschitz.
class SubgradientOracle {
 public:
  virtual ~SubgradientOracle() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;
  virtual double weak_convexity() const = 0;
  virtual double lipschitz() const = 0;
};

// Convex Lipschitz function with both a prox and a computable conjugate.
// This is the outer function h of a composite problem g + h(c(x)).
class LipschitzConvex : public ProxOracle, public SubgradientOracle {
 public:
  double value(const Vector& x) const override = 0;
  Vector subgradient(const Vector& x) const override = 0;
  double weak_convexity() const final { return 0.0; }
  // h*(u); +inf off the domain of the conjugate.
  virtual double conjugate(const Vector& u) const = 0;
  // prox of sigma * h*, by default through the Moreau identity
  //   prox_{sigma h*}(u) = u - sigma prox_{h/sigma}(u / sigma).
  virtual Vector prox_conjugate(double sigma, const Vector& u) const;
  // When dom h* is a single point (h linear) returns that point.
  virtual std::optional<Vector> dual_singleton(std::size_t output_dim) const;
  // Set when h = weight * |.|_1.
  virtual std::optional<double> l1_weight() const { return std::nullopt; }
};

// Smooth map c: R^d -> R^m accessed through Jacobian products.
// beta() bounds the Lipschitz constant of the Jacobian.
class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual Vector eval(const Vector& x) const = 0;
  // grad c(x) v
  virtual Vector jvp(const Vector& x, const Vector& v) const = 0;
  // grad c(x)^T u
  virtual Vector vjp(const Vector& x, const Vector& u) const = 0;
  virtual double beta() const = 0;
};

// C^1 function with Lipschitz gradient; weak_convexity() <= lipschitz().
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double lipschitz() const = 0;
  virtual double weak_convexity() const = 0;
};

// f = smooth + nonsmooth with a prox for the nonsmooth part.
struct SmoothPlusProx {
  std::shared_ptr<const SmoothFunction> smooth;
  std::shared_ptr<const ProxOracle> nonsmooth;

  double value(const Vector& x) const { return smooth->value(x) + nonsmooth->value(x); }
  double weak_convexity() const { return smooth->weak_convexity(); }
};

// F(x) = g(x) + h(c(x)). The product L * beta bounds the linearization error
//   |F(x) - F(x; y)| <= (L * beta / 2) |x - y|^2,
// hence also the weak convexity modulus of F.
struct CompositeProblem {
  std::shared_ptr<const ProxOracle> g;
  std::shared_ptr<const LipschitzConvex> h;
  std::shared_ptr<const SmoothMap> c;
  double L = 1.0;
  double beta = 1.0;

  std::size_t dim() const { return c->input_dim(); }
  double value(const Vector& x) const { return g->value(x) + h->value(c->eval(x)); }
  double weak_convexity() const { return L * beta; }
};

}  // namespace proxkit
