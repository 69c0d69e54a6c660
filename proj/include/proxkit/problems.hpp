#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxkit/catalyst.hpp"
#include "proxkit/oracles.hpp"
#include "proxkit/pgsg.hpp"

namespace proxkit {

struct NamedArray {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  Vector as_vector() const;
  Matrix as_matrix() const;
};

// Everything needed to rebuild an instance bit-for-bit: a generator kind,
// its configuration echo, derived constants, and the raw data arrays.
struct InstanceData {
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<NamedArray> arrays;

  const NamedArray& array(const std::string& name) const;
  bool has_array(const std::string& name) const;
  double constant(const std::string& name) const;
  std::optional<double> find_constant(const std::string& name) const;
  void add_array(std::string name, const Matrix& m);
  void add_array(std::string name, const Vector& v);
};

struct SyntheticInstance {
  InstanceData data;
  std::shared_ptr<const CompositeProblem> composite;
  std::shared_ptr<const FiniteSumProblem> finite_sum;
  std::shared_ptr<const StochasticProblem> stochastic;
  std::optional<Vector> ground_truth;
  std::optional<double> optimum_value;
};

// Rebuilds oracles from data; the generators below end with this call.
SyntheticInstance build_instance(InstanceData data);

// min_x (1/m) sum_i |<a_i, x>^2 - b_i^2|, a_i standard Gaussian, b_i =
// |<a_i, xbar>| for a unit-norm xbar, with round(outlier_frac m) of the b_i
// replaced by 3 |N(0, 1)|. h is the l1-mean, g = 0, and L * beta is
// 1.1 * 2 lambda_max(A^T A / m). Also exposes the stochastic view
// f(x, i) = |<a_i, x>^2 - b_i^2| with rho = 2 max_i |a_i|^2.
SyntheticInstance make_phase_retrieval(std::size_t d, std::size_t m, double outlier_frac,
                                       std::uint64_t seed);

// min_{U,V} |U V^T - M|_1 over the flattened (U, V), M = Ubar Vbar^T + S with
// round(sparsity rows cols) entries of S set to +-U(0.5, 1.5).
SyntheticInstance make_robust_pca(std::size_t rows, std::size_t cols, std::size_t rank,
                                  double sparsity, std::uint64_t seed);

// min_theta sum_{ij in E} |theta_i theta_j - M_ij| over an Erdos-Renyi edge
// set of unordered pairs, with observed signs flipped at rate flip_prob.
SyntheticInstance make_z2_sync(std::size_t d, double edge_prob, double flip_prob, std::uint64_t seed);

// min_x |c(x)|_2 over a box, c_k(x) = x^T Q_k x / 2 + p_k^T x + r_k with a
// planted interior root.
SyntheticInstance make_box_nls(std::size_t d, std::size_t m, std::uint64_t seed);

// c(x) = |Ax - b|^2 / 2, h = identity, g = lambda |.|_1.
SyntheticInstance make_lasso(std::size_t d, std::size_t m, double lambda, std::uint64_t seed);

// f_i(x) = log(1 + exp(-b_i <a_i, x>)) + mu/2 |x|^2 with |a_i| = 2, so each
// f_i has a (1 + mu)-Lipschitz gradient. Features have a geometrically
// decaying spectrum. optimum_value comes from Newton's method.
SyntheticInstance make_erm_logistic(std::size_t d, std::size_t m, double mu, std::uint64_t seed);

// f_i(x) = (<a_i, x> - b_i)^2 / 2 + mu/2 |x|^2 with mu chosen so that
// beta_full / mu = condition exactly; optimum_value from a direct solve.
SyntheticInstance make_ridge(std::size_t d, std::size_t m, double condition, std::uint64_t seed);

// Linear-model finite sums built from data (used by the generators and
// directly by tests).
std::shared_ptr<const FiniteSumProblem> make_logistic_problem(Matrix features, Vector labels, double mu);
std::shared_ptr<const FiniteSumProblem> make_ridge_problem(Matrix features, Vector targets, double mu);

}  // namespace proxkit
