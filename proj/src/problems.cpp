#include "proxkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "proxkit/functions.hpp"
#include "proxkit/text.hpp"

namespace proxkit {

// ---------------------------------------------------------------------------
// InstanceData

Vector NamedArray::as_vector() const {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix NamedArray::as_matrix() const {
  return Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

const NamedArray& InstanceData::array(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a;
  throw std::out_of_range("instance '" + kind + "' has no array '" + name + "'");
}

bool InstanceData::has_array(const std::string& name) const {
  return std::any_of(arrays.begin(), arrays.end(), [&](const NamedArray& a) { return a.name == name; });
}

std::optional<double> InstanceData::find_constant(const std::string& name) const {
  for (const auto& [key, value] : constants)
    if (key == name) return value;
  return std::nullopt;
}

double InstanceData::constant(const std::string& name) const {
  if (auto v = find_constant(name)) return *v;
  throw std::out_of_range("instance '" + kind + "' has no constant '" + name + "'");
}

void InstanceData::add_array(std::string name, const Matrix& m) {
  NamedArray a{std::move(name), static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
               std::vector<double>(m.data(), m.data() + m.size())};
  arrays.push_back(std::move(a));
}

void InstanceData::add_array(std::string name, const Vector& v) {
  NamedArray a{std::move(name), static_cast<std::size_t>(v.size()), 1,
               std::vector<double>(v.data(), v.data() + v.size())};
  arrays.push_back(std::move(a));
}

namespace {

// ---------------------------------------------------------------------------
// generation helpers

Matrix gaussian_matrix(RandomStream& rng, std::size_t rows, std::size_t cols) {
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  return a;
}

Vector gaussian_vector(RandomStream& rng, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& e : v) e = rng.normal();
  return v;
}

// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> choose_indices(RandomStream& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

double max_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

InstanceData start(std::string kind, std::uint64_t seed) {
  InstanceData data;
  data.kind = std::move(kind);
  data.seed = seed;
  return data;
}

void echo(InstanceData& data, const std::string& key, double v) { data.config.emplace_back(key, format_double(v)); }
void echo(InstanceData& data, const std::string& key, std::size_t v) {
  data.config.emplace_back(key, std::to_string(v));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// ---------------------------------------------------------------------------
// smooth maps

class PhaseRetrievalMap final : public SmoothMap {
 public:
  PhaseRetrievalMap(Matrix a, const Vector& b, double beta)
      : a_(std::move(a)), b2_(b.array().square().matrix()), beta_(beta) {}
  std::size_t input_dim() const override { return static_cast<std::size_t>(a_.cols()); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(a_.rows()); }
  Vector eval(const Vector& x) const override { return (a_ * x).array().square().matrix() - b2_; }
  Vector jvp(const Vector& x, const Vector& v) const override {
    return (2.0 * (a_ * x).array() * (a_ * v).array()).matrix();
  }
  Vector vjp(const Vector& x, const Vector& u) const override {
    return a_.transpose() * (2.0 * (a_ * x).array() * u.array()).matrix();
  }
  double beta() const override { return beta_; }

 private:
  Matrix a_;
  Vector b2_;
  double beta_;
};

class PhaseRetrievalStochastic final : public StochasticProblem {
 public:
  PhaseRetrievalStochastic(Matrix a, Vector b, std::shared_ptr<const CompositeProblem> full)
      : a_(std::move(a)), b2_(b.array().square().matrix()), full_(std::move(full)) {
    rho_ = 2.0 * a_.rowwise().squaredNorm().maxCoeff();
  }
  std::size_t dim() const override { return static_cast<std::size_t>(a_.cols()); }
  SampleHandle sample(RandomStream& rng) const override {
    return rng.uniform_index(static_cast<std::uint64_t>(a_.rows()));
  }
  double stoch_value(const Vector& x, SampleHandle i) const override {
    const double s = a_.row(static_cast<Eigen::Index>(i)).dot(x);
    return std::abs(s * s - b2_[static_cast<Eigen::Index>(i)]);
  }
  Vector stoch_subgradient(const Vector& x, SampleHandle i) const override {
    const auto row = a_.row(static_cast<Eigen::Index>(i));
    const double s = row.dot(x);
    return (2.0 * sign(s * s - b2_[static_cast<Eigen::Index>(i)]) * s) * row.transpose();
  }
  double weak_convexity() const override { return rho_; }
  // On the ball |x| <= 3.
  double lipschitz() const override { return 3.0 * rho_; }
  std::optional<double> full_value(const Vector& x) const override { return full_->value(x); }
  const CompositeProblem* full_composite() const override { return full_.get(); }

 private:
  Matrix a_;
  Vector b2_;
  std::shared_ptr<const CompositeProblem> full_;
  double rho_ = 0.0;
};

// Variables are (U, V) flattened row-major one after the other.
class RobustPcaMap final : public SmoothMap {
 public:
  RobustPcaMap(Matrix m, std::size_t rank) : m_(std::move(m)), rank_(static_cast<Eigen::Index>(rank)) {}
  std::size_t input_dim() const override { return static_cast<std::size_t>((m_.rows() + m_.cols()) * rank_); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(m_.size()); }

  Vector eval(const Vector& x) const override {
    const Matrix r = u(x) * v(x).transpose() - m_;
    return flat(r);
  }
  Vector jvp(const Vector& x, const Vector& dx) const override {
    const Matrix r = u(dx) * v(x).transpose() + u(x) * v(dx).transpose();
    return flat(r);
  }
  Vector vjp(const Vector& x, const Vector& w) const override {
    const Eigen::Map<const Matrix> wm(w.data(), m_.rows(), m_.cols());
    Vector out(static_cast<Eigen::Index>(input_dim()));
    Eigen::Map<Matrix>(out.data(), m_.rows(), rank_) = wm * v(x);
    Eigen::Map<Matrix>(out.data() + m_.rows() * rank_, m_.cols(), rank_) = wm.transpose() * u(x);
    return out;
  }
  double beta() const override { return 1.0; }

 private:
  Eigen::Map<const Matrix> u(const Vector& x) const { return {x.data(), m_.rows(), rank_}; }
  Eigen::Map<const Matrix> v(const Vector& x) const {
    return {x.data() + m_.rows() * rank_, m_.cols(), rank_};
  }
  static Vector flat(const Matrix& r) { return Eigen::Map<const Vector>(r.data(), r.size()); }

  Matrix m_;
  Eigen::Index rank_;
};

class Z2SyncMap final : public SmoothMap {
 public:
  Z2SyncMap(std::size_t d, std::vector<std::pair<Eigen::Index, Eigen::Index>> edges, Vector observed)
      : d_(d), edges_(std::move(edges)), observed_(std::move(observed)) {}
  std::size_t input_dim() const override { return d_; }
  std::size_t output_dim() const override { return edges_.size(); }
  Vector eval(const Vector& x) const override {
    Vector out(static_cast<Eigen::Index>(edges_.size()));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [i, j] = edges_[e];
      out[static_cast<Eigen::Index>(e)] = x[i] * x[j] - observed_[static_cast<Eigen::Index>(e)];
    }
    return out;
  }
  Vector jvp(const Vector& x, const Vector& v) const override {
    Vector out(static_cast<Eigen::Index>(edges_.size()));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [i, j] = edges_[e];
      out[static_cast<Eigen::Index>(e)] = v[i] * x[j] + x[i] * v[j];
    }
    return out;
  }
  Vector vjp(const Vector& x, const Vector& u) const override {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d_));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto [i, j] = edges_[e];
      const double ue = u[static_cast<Eigen::Index>(e)];
      out[i] += ue * x[j];
      out[j] += ue * x[i];
    }
    return out;
  }
  double beta() const override { return 1.0; }

 private:
  std::size_t d_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges_;
  Vector observed_;
};

// c_k(x) = x^T Q_k x / 2 + p_k^T x + r_k; Q stacked as (m d) x d.
class BoxNlsMap final : public SmoothMap {
 public:
  BoxNlsMap(Matrix q, Matrix p, Vector r, double beta)
      : q_(std::move(q)), p_(std::move(p)), r_(std::move(r)), beta_(beta) {}
  std::size_t input_dim() const override { return static_cast<std::size_t>(p_.cols()); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(p_.rows()); }
  Vector eval(const Vector& x) const override {
    Vector out(p_.rows());
    for (Eigen::Index k = 0; k < p_.rows(); ++k)
      out[k] = 0.5 * x.dot(block(k) * x) + p_.row(k).dot(x) + r_[k];
    return out;
  }
  Vector jvp(const Vector& x, const Vector& v) const override { return jacobian(x) * v; }
  Vector vjp(const Vector& x, const Vector& u) const override { return jacobian(x).transpose() * u; }
  double beta() const override { return beta_; }

 private:
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> block(Eigen::Index k) const { return q_.middleRows(k * p_.cols(), p_.cols()); }
  Matrix jacobian(const Vector& x) const {
    Matrix j = p_;
    for (Eigen::Index k = 0; k < p_.rows(); ++k) j.row(k) += (block(k) * x).transpose();
    return j;
  }

  Matrix q_;
  Matrix p_;
  Vector r_;
  double beta_;
};

// c(x) = |Ax - b|^2 / 2 as a map into R^1.
class LassoMap final : public SmoothMap {
 public:
  LassoMap(Matrix a, Vector b, double beta) : a_(std::move(a)), b_(std::move(b)), beta_(beta) {}
  std::size_t input_dim() const override { return static_cast<std::size_t>(a_.cols()); }
  std::size_t output_dim() const override { return 1; }
  Vector eval(const Vector& x) const override {
    Vector out(1);
    out[0] = 0.5 * (a_ * x - b_).squaredNorm();
    return out;
  }
  Vector jvp(const Vector& x, const Vector& v) const override {
    Vector out(1);
    out[0] = (a_ * x - b_).dot(a_ * v);
    return out;
  }
  Vector vjp(const Vector& x, const Vector& u) const override {
    return u[0] * (a_.transpose() * (a_ * x - b_));
  }
  double beta() const override { return beta_; }

 private:
  Matrix a_;
  Vector b_;
  double beta_;
};

// ---------------------------------------------------------------------------
// finite sums over linear models: f_i(x) = loss(<a_i, x>, y_i) + mu/2 |x|^2

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

template <class Loss>
class LinearModelSum final : public FiniteSumProblem {
 public:
  LinearModelSum(Matrix a, Vector y, double mu) : a_(std::move(a)), y_(std::move(y)), mu_(mu) {
    require(a_.rows() == y_.size(), "finite sum: features and labels disagree in length");
    require(a_.rows() > 0, "finite sum: need at least one component");
    require(mu_ > 0.0, "finite sum: mu must be positive");
    beta_component_ = Loss::curvature * a_.rowwise().squaredNorm().maxCoeff() + mu_;
    const Eigen::MatrixXd gram = a_.transpose() * a_ / static_cast<double>(a_.rows());
    beta_full_ = Loss::curvature * max_eigenvalue(gram) + mu_;
  }

  std::size_t size() const override { return static_cast<std::size_t>(a_.rows()); }
  std::size_t dim() const override { return static_cast<std::size_t>(a_.cols()); }
  double component_value(std::size_t i, const Vector& x) const override {
    const auto k = static_cast<Eigen::Index>(i);
    return Loss::value(a_.row(k).dot(x), y_[k]) + 0.5 * mu_ * x.squaredNorm();
  }
  void component_gradient(std::size_t i, const Vector& x, Vector& out) const override {
    const auto k = static_cast<Eigen::Index>(i);
    const double s = Loss::derivative(a_.row(k).dot(x), y_[k]);
    out = s * a_.row(k).transpose() + mu_ * x;
  }
  double smooth_value(const Vector& x) const override {
    const Vector s = a_ * x;
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) total += Loss::value(s[k], y_[k]);
    return total / static_cast<double>(s.size()) + 0.5 * mu_ * x.squaredNorm();
  }
  Vector full_gradient(const Vector& x) const override {
    Vector s = a_ * x;
    for (Eigen::Index k = 0; k < s.size(); ++k) s[k] = Loss::derivative(s[k], y_[k]);
    return a_.transpose() * s / static_cast<double>(s.size()) + mu_ * x;
  }
  const ProxOracle& regularizer() const override { return zero_; }
  double mu() const override { return mu_; }
  double beta_component() const override { return beta_component_; }
  double beta_full() const override { return beta_full_; }

  const Matrix& features() const { return a_; }
  const Vector& labels() const { return y_; }

 private:
  Matrix a_;
  Vector y_;
  double mu_;
  double beta_component_ = 0.0;
  double beta_full_ = 0.0;
  ZeroFunction zero_;
};

struct SquaredLoss {
  static constexpr double curvature = 1.0;
  static double value(double s, double y) { return 0.5 * (s - y) * (s - y); }
  static double derivative(double s, double y) { return s - y; }
};

struct LogisticLoss {
  static constexpr double curvature = 0.25;
  static double value(double s, double y) { return softplus(-y * s); }
  static double derivative(double s, double y) { return -y * logistic(-y * s); }
};

// Minimizer of the logistic objective by damped Newton.
Vector logistic_newton(const Matrix& a, const Vector& y, double mu) {
  const auto m = static_cast<double>(a.rows());
  const LinearModelSum<LogisticLoss> problem(a, y, mu);
  Vector x = Vector::Zero(a.cols());
  for (int it = 0; it < 200; ++it) {
    const Vector grad = problem.full_gradient(x);
    if (grad.norm() <= 1e-14) break;
    const Vector s = a * x;
    Vector w(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double p = logistic(y[k] * s[k]);
      w[k] = p * (1.0 - p);
    }
    Eigen::MatrixXd hess = a.transpose() * w.asDiagonal() * a / m;
    hess.diagonal().array() += mu;
    const Vector step = hess.ldlt().solve(grad);
    double t = 1.0;
    const double f0 = problem.smooth_value(x);
    while (t > 1e-12 && problem.smooth_value(x - t * step) > f0 - 0.25 * t * grad.dot(step)) t *= 0.5;
    const Vector next = x - t * step;
    if ((next - x).norm() <= 1e-16 * (1.0 + x.norm())) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// Features z_i scaled by a spectrum decaying geometrically over `decades`
// orders of magnitude in standard deviation.
Matrix decaying_features(RandomStream& rng, std::size_t m, std::size_t d, double decades) {
  Matrix a = gaussian_matrix(rng, m, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double frac = d > 1 ? static_cast<double>(k) / static_cast<double>(d - 1) : 0.0;
    a.col(static_cast<Eigen::Index>(k)) *= std::pow(10.0, -decades * frac);
  }
  return a;
}

}  // namespace

std::shared_ptr<const FiniteSumProblem> make_logistic_problem(Matrix features, Vector labels, double mu) {
  return std::make_shared<LinearModelSum<LogisticLoss>>(std::move(features), std::move(labels), mu);
}

std::shared_ptr<const FiniteSumProblem> make_ridge_problem(Matrix features, Vector targets, double mu) {
  return std::make_shared<LinearModelSum<SquaredLoss>>(std::move(features), std::move(targets), mu);
}

// ---------------------------------------------------------------------------
// build_instance

namespace {

void build_phase_retrieval(SyntheticInstance& inst) {
  const auto& data = inst.data;
  Matrix a = data.array("A").as_matrix();
  const Vector b = data.array("b").as_vector();
  auto problem = std::make_shared<CompositeProblem>();
  problem->g = std::make_shared<ZeroFunction>();
  problem->h = std::make_shared<L1Norm>(1.0 / static_cast<double>(a.rows()), static_cast<std::size_t>(a.rows()));
  problem->c = std::make_shared<PhaseRetrievalMap>(a, b, data.constant("beta"));
  problem->L = 1.0;
  problem->beta = data.constant("beta");
  inst.composite = problem;
  inst.stochastic = std::make_shared<PhaseRetrievalStochastic>(std::move(a), b, problem);
}

void build_robust_pca(SyntheticInstance& inst) {
  const auto& data = inst.data;
  Matrix m = data.array("M").as_matrix();
  const auto rank = static_cast<std::size_t>(data.constant("rank"));
  auto problem = std::make_shared<CompositeProblem>();
  problem->g = std::make_shared<ZeroFunction>();
  problem->h = std::make_shared<L1Norm>(1.0, static_cast<std::size_t>(m.size()));
  problem->L = std::sqrt(static_cast<double>(m.size()));
  problem->beta = 1.0;
  problem->c = std::make_shared<RobustPcaMap>(std::move(m), rank);
  inst.composite = problem;
}

void build_z2_sync(SyntheticInstance& inst) {
  const auto& data = inst.data;
  const auto d = static_cast<std::size_t>(data.constant("d"));
  const Matrix edges = data.array("edges").as_matrix();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> list;
  std::vector<int> degree(d, 0);
  for (Eigen::Index e = 0; e < edges.rows(); ++e) {
    const auto i = static_cast<Eigen::Index>(edges(e, 0));
    const auto j = static_cast<Eigen::Index>(edges(e, 1));
    list.emplace_back(i, j);
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }
  const int max_degree = degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  auto problem = std::make_shared<CompositeProblem>();
  problem->g = std::make_shared<ZeroFunction>();
  problem->h = std::make_shared<L1Norm>(1.0, list.size());
  // sum_E |dtheta_i dtheta_j| <= (max degree / 2) |dtheta|^2
  problem->L = 1.0;
  problem->beta = std::max(1.0, static_cast<double>(max_degree));
  problem->c = std::make_shared<Z2SyncMap>(d, std::move(list), data.array("M_obs").as_vector());
  inst.composite = problem;
}

void build_box_nls(SyntheticInstance& inst) {
  const auto& data = inst.data;
  auto problem = std::make_shared<CompositeProblem>();
  problem->g = std::make_shared<BoxIndicator>(data.array("lower").as_vector(), data.array("upper").as_vector());
  problem->h = std::make_shared<L2Norm>(1.0);
  problem->L = 1.0;
  problem->beta = data.constant("beta");
  problem->c = std::make_shared<BoxNlsMap>(data.array("Q").as_matrix(), data.array("P").as_matrix(),
                                           data.array("r").as_vector(), problem->beta);
  inst.composite = problem;
}

void build_lasso(SyntheticInstance& inst) {
  const auto& data = inst.data;
  Matrix a = data.array("A").as_matrix();
  auto problem = std::make_shared<CompositeProblem>();
  problem->g = std::make_shared<L1Norm>(data.constant("lambda"), static_cast<std::size_t>(a.cols()));
  problem->h = std::make_shared<Identity>();
  problem->L = 1.0;
  problem->beta = data.constant("beta");
  problem->c = std::make_shared<LassoMap>(std::move(a), data.array("b").as_vector(), problem->beta);
  inst.composite = problem;
}

}  // namespace

SyntheticInstance build_instance(InstanceData data) {
  SyntheticInstance inst;
  inst.data = std::move(data);
  const std::string& kind = inst.data.kind;
  if (kind == "phase_retrieval")
    build_phase_retrieval(inst);
  else if (kind == "robust_pca")
    build_robust_pca(inst);
  else if (kind == "z2_sync")
    build_z2_sync(inst);
  else if (kind == "box_nls")
    build_box_nls(inst);
  else if (kind == "lasso")
    build_lasso(inst);
  else if (kind == "erm_logistic")
    inst.finite_sum = make_logistic_problem(inst.data.array("A").as_matrix(), inst.data.array("b").as_vector(),
                                            inst.data.constant("mu"));
  else if (kind == "ridge")
    inst.finite_sum = make_ridge_problem(inst.data.array("A").as_matrix(), inst.data.array("b").as_vector(),
                                         inst.data.constant("mu"));
  else
    throw std::invalid_argument("unknown instance kind '" + kind + "'");

  if (inst.data.has_array("x_true")) inst.ground_truth = inst.data.array("x_true").as_vector();
  inst.optimum_value = inst.data.find_constant("optimum_value");
  return inst;
}

// ---------------------------------------------------------------------------
// generators

SyntheticInstance make_phase_retrieval(std::size_t d, std::size_t m, double outlier_frac, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "make_phase_retrieval: need d, m >= 1");
  require(outlier_frac >= 0.0 && outlier_frac < 1.0, "make_phase_retrieval: outlier_frac must lie in [0, 1)");
  RandomStream rng(seed, 0);
  InstanceData data = start("phase_retrieval", seed);
  echo(data, "d", d);
  echo(data, "m", m);
  echo(data, "outlier_frac", outlier_frac);

  const Matrix a = gaussian_matrix(rng, m, d);
  Vector x_true = gaussian_vector(rng, d);
  x_true.normalize();
  Vector b = (a * x_true).cwiseAbs();
  const auto n_out = static_cast<std::size_t>(std::llround(outlier_frac * static_cast<double>(m)));
  for (std::size_t i : choose_indices(rng, m, n_out)) b[static_cast<Eigen::Index>(i)] = 3.0 * std::abs(rng.normal());

  const Eigen::MatrixXd gram = a.transpose() * a / static_cast<double>(m);
  data.constants = {{"beta", 1.1 * 2.0 * max_eigenvalue(gram)},
                    {"rho_sample", 2.0 * a.rowwise().squaredNorm().maxCoeff()},
                    {"outliers", static_cast<double>(n_out)}};
  if (n_out == 0) data.constants.emplace_back("optimum_value", 0.0);
  data.add_array("A", a);
  data.add_array("b", b);
  data.add_array("x_true", x_true);
  return build_instance(std::move(data));
}

SyntheticInstance make_robust_pca(std::size_t rows, std::size_t cols, std::size_t rank, double sparsity,
                                  std::uint64_t seed) {
  require(rows >= 1 && cols >= 1 && rank >= 1, "make_robust_pca: dimensions must be positive");
  require(rank <= std::min(rows, cols), "make_robust_pca: rank exceeds min(rows, cols)");
  require(sparsity >= 0.0 && sparsity <= 1.0, "make_robust_pca: sparsity must lie in [0, 1]");
  RandomStream rng(seed, 0);
  InstanceData data = start("robust_pca", seed);
  echo(data, "rows", rows);
  echo(data, "cols", cols);
  echo(data, "rank", rank);
  echo(data, "sparsity", sparsity);

  const Matrix u = gaussian_matrix(rng, rows, rank);
  const Matrix v = gaussian_matrix(rng, cols, rank);
  Matrix m = u * v.transpose();
  const auto n_corrupt = static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(rows * cols)));
  for (std::size_t idx : choose_indices(rng, rows * cols, n_corrupt)) {
    const double magnitude = rng.uniform(0.5, 1.5);
    m.data()[idx] += rng.bernoulli(0.5) ? magnitude : -magnitude;
  }

  Vector x_true(static_cast<Eigen::Index>((rows + cols) * rank));
  x_true << Eigen::Map<const Vector>(u.data(), u.size()), Eigen::Map<const Vector>(v.data(), v.size());
  data.constants = {{"rank", static_cast<double>(rank)}, {"corrupted", static_cast<double>(n_corrupt)}};
  if (n_corrupt == 0) data.constants.emplace_back("optimum_value", 0.0);
  data.add_array("U_true", u);
  data.add_array("V_true", v);
  data.add_array("M", m);
  data.add_array("x_true", x_true);
  return build_instance(std::move(data));
}

SyntheticInstance make_z2_sync(std::size_t d, double edge_prob, double flip_prob, std::uint64_t seed) {
  require(d >= 2, "make_z2_sync: need d >= 2");
  require(edge_prob > 0.0 && edge_prob <= 1.0, "make_z2_sync: edge_prob must lie in (0, 1]");
  require(flip_prob >= 0.0 && flip_prob < 1.0, "make_z2_sync: flip_prob must lie in [0, 1)");
  RandomStream rng(seed, 0);
  InstanceData data = start("z2_sync", seed);
  echo(data, "d", d);
  echo(data, "edge_prob", edge_prob);
  echo(data, "flip_prob", flip_prob);

  Vector theta(static_cast<Eigen::Index>(d));
  for (auto& t : theta) t = rng.bernoulli(0.5) ? 1.0 : -1.0;
  std::vector<double> edge_list;
  std::vector<double> observed;
  std::size_t flips = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (!rng.bernoulli(edge_prob)) continue;
      double value = theta[static_cast<Eigen::Index>(i)] * theta[static_cast<Eigen::Index>(j)];
      if (rng.bernoulli(flip_prob)) {
        value = -value;
        ++flips;
      }
      edge_list.push_back(static_cast<double>(i));
      edge_list.push_back(static_cast<double>(j));
      observed.push_back(value);
    }
  }
  data.constants = {{"d", static_cast<double>(d)}, {"flips", static_cast<double>(flips)}};
  if (flips == 0) data.constants.emplace_back("optimum_value", 0.0);
  data.arrays.push_back({"edges", observed.size(), 2, std::move(edge_list)});
  data.arrays.push_back({"M_obs", observed.size(), 1, std::move(observed)});
  data.add_array("x_true", theta);
  return build_instance(std::move(data));
}

SyntheticInstance make_box_nls(std::size_t d, std::size_t m, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "make_box_nls: need d, m >= 1");
  RandomStream rng(seed, 0);
  InstanceData data = start("box_nls", seed);
  echo(data, "d", d);
  echo(data, "m", m);

  const auto dd = static_cast<Eigen::Index>(d);
  Matrix q(static_cast<Eigen::Index>(m * d), dd);
  double beta_sq = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const Matrix g = gaussian_matrix(rng, d, d);
    const Matrix sym = (g + g.transpose()) / (2.0 * std::sqrt(static_cast<double>(d)));
    q.middleRows(static_cast<Eigen::Index>(k) * dd, dd) = sym;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(sym), Eigen::EigenvaluesOnly);
    const double op = eig.eigenvalues().cwiseAbs().maxCoeff();
    beta_sq += op * op;
  }
  const Matrix p = gaussian_matrix(rng, m, d);
  Vector lower(dd), upper(dd), x_true(dd);
  for (Eigen::Index i = 0; i < dd; ++i) {
    lower[i] = -rng.uniform(0.5, 1.5);
    upper[i] = rng.uniform(0.5, 1.5);
    x_true[i] = lower[i] + (upper[i] - lower[i]) * rng.uniform(0.25, 0.75);
  }
  Vector r(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < r.size(); ++k)
    r[k] = -(0.5 * x_true.dot(q.middleRows(k * dd, dd) * x_true) + p.row(k).dot(x_true));

  data.constants = {{"beta", std::sqrt(beta_sq)}, {"optimum_value", 0.0}};
  data.add_array("Q", q);
  data.add_array("P", p);
  data.add_array("r", r);
  data.add_array("lower", lower);
  data.add_array("upper", upper);
  data.add_array("x_true", x_true);
  return build_instance(std::move(data));
}

SyntheticInstance make_lasso(std::size_t d, std::size_t m, double lambda, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "make_lasso: need d, m >= 1");
  require(lambda >= 0.0, "make_lasso: lambda must be nonnegative");
  RandomStream rng(seed, 0);
  InstanceData data = start("lasso", seed);
  echo(data, "d", d);
  echo(data, "m", m);
  echo(data, "lambda", lambda);

  const Matrix a = gaussian_matrix(rng, m, d) / std::sqrt(static_cast<double>(m));
  Vector x_true = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i : choose_indices(rng, d, std::max<std::size_t>(1, d / 10)))
    x_true[static_cast<Eigen::Index>(i)] = rng.normal();
  const Vector b = a * x_true + 0.01 * gaussian_vector(rng, m);

  const Eigen::MatrixXd gram = a.transpose() * a;
  data.constants = {{"lambda", lambda}, {"beta", max_eigenvalue(gram)}};
  data.add_array("A", a);
  data.add_array("b", b);
  data.add_array("x_true", x_true);
  return build_instance(std::move(data));
}

SyntheticInstance make_erm_logistic(std::size_t d, std::size_t m, double mu, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "make_erm_logistic: need d, m >= 1");
  require(mu > 0.0, "make_erm_logistic: mu must be positive");
  RandomStream rng(seed, 0);
  InstanceData data = start("erm_logistic", seed);
  echo(data, "d", d);
  echo(data, "m", m);
  echo(data, "mu", mu);

  Matrix a = decaying_features(rng, m, d, 3.0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) *= 2.0 / a.row(i).norm();
  const Vector x_true = gaussian_vector(rng, d);
  Vector labels(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    labels[i] = (a.row(i).dot(x_true) + 0.5 * rng.normal()) >= 0.0 ? 1.0 : -1.0;

  const Vector x_star = logistic_newton(a, labels, mu);
  const double f_star = LinearModelSum<LogisticLoss>(a, labels, mu).value(x_star);
  data.constants = {{"mu", mu}, {"optimum_value", f_star}};
  data.add_array("A", a);
  data.add_array("b", labels);
  data.add_array("x_true", x_true);
  data.add_array("x_star", x_star);
  return build_instance(std::move(data));
}

SyntheticInstance make_ridge(std::size_t d, std::size_t m, double condition, std::uint64_t seed) {
  require(d >= 1 && m >= 1, "make_ridge: need d, m >= 1");
  require(condition > 1.0, "make_ridge: condition must exceed 1");
  RandomStream rng(seed, 0);
  InstanceData data = start("ridge", seed);
  echo(data, "d", d);
  echo(data, "m", m);
  echo(data, "condition", condition);

  const Matrix a = decaying_features(rng, m, d, 3.0);
  const Vector x_true = gaussian_vector(rng, d);
  const Vector b = a * x_true + 0.1 * gaussian_vector(rng, m);
  const Eigen::MatrixXd gram = a.transpose() * a / static_cast<double>(m);
  const double mu = max_eigenvalue(gram) / (condition - 1.0);

  Eigen::MatrixXd system = gram;
  system.diagonal().array() += mu;
  const Vector x_star = system.ldlt().solve(a.transpose() * b / static_cast<double>(m));
  const double f_star = LinearModelSum<SquaredLoss>(a, b, mu).value(x_star);
  data.constants = {{"mu", mu}, {"optimum_value", f_star}};
  data.add_array("A", a);
  data.add_array("b", b);
  data.add_array("x_true", x_true);
  data.add_array("x_star", x_star);
  return build_instance(std::move(data));
}

}  // namespace proxkit
