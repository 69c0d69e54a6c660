#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace proxkit {

// Every point in R^d lives in a dense column vector. Matrix-valued
// variables (robust PCA factors) are stored flattened row-major.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Throws std::domain_error naming `what` if v holds a NaN or Inf.
inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw std::domain_error(what + ": non-finite entry");
}

inline void require_same_dim(const Vector& a, const Vector& b, const std::string& what) {
  if (a.size() != b.size())
    throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace proxkit
