#include <doctest.h>

#include <cmath>
#include <sstream>

#include "proxkit/functions.hpp"
#include "proxkit/instance_io.hpp"
#include "proxkit/numerics.hpp"
#include "proxkit/problems.hpp"

using namespace proxkit;

namespace {

Vector normal_vector(RandomStream& rng, std::size_t d) {
  Vector v(static_cast<Eigen::Index>(d));
  for (auto& e : v) e = rng.normal();
  return v;
}

std::vector<SyntheticInstance> composite_instances() {
  std::vector<SyntheticInstance> out;
  out.push_back(make_phase_retrieval(6, 40, 0.1, 1));
  out.push_back(make_robust_pca(5, 4, 2, 0.1, 1));
  out.push_back(make_z2_sync(8, 0.6, 0.1, 1));
  out.push_back(make_box_nls(5, 7, 1));
  out.push_back(make_lasso(10, 20, 0.1, 1));
  return out;
}

}  // namespace

TEST_CASE("phase retrieval") {
  const auto inst = make_phase_retrieval(6, 40, 0.0, 2);
  const CompositeProblem& p = *inst.composite;
  const Vector truth = *inst.ground_truth;
  CHECK(truth.norm() == doctest::Approx(1.0));
  CHECK(p.value(truth) <= 1e-15);
  CHECK(inst.optimum_value == 0.0);

  const CompositeObjective f(p);
  RandomStream rng(2, 2);
  for (int k = 0; k < 20; ++k) {
    const Vector x = normal_vector(rng, 6);
    CHECK(p.value(x) == p.value(-x));
    const Vector fd = finite_difference_gradient([&](const Vector& y) { return p.value(y); }, x);
    CHECK((f.subgradient(x) - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
  }

  const auto noisy = make_phase_retrieval(6, 40, 0.25, 2);
  CHECK(noisy.data.constant("outliers") == 10.0);
  CHECK_FALSE(noisy.optimum_value.has_value());
  CHECK(noisy.composite->value(*noisy.ground_truth) > 0.0);
}

TEST_CASE("robust pca") {
  const auto inst = make_robust_pca(6, 5, 2, 0.0, 3);
  const CompositeProblem& p = *inst.composite;
  const Vector truth = *inst.ground_truth;
  CHECK(p.value(truth) <= 1e-12);

  // (c U, V / c) gives the same product.
  Vector scaled = truth;
  scaled.head(12) *= 3.0;
  scaled.tail(10) /= 3.0;
  CHECK(p.value(scaled) == doctest::Approx(p.value(truth)).epsilon(1e-12));

  RandomStream rng(3, 2);
  for (int k = 0; k < 10; ++k) {
    const Vector x = normal_vector(rng, 22), v = normal_vector(rng, 22);
    const double h = 1e-6;
    const Vector fd = (p.c->eval(x + h * v) - p.c->eval(x - h * v)) / (2 * h);
    CHECK((p.c->jvp(x, v) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));
  }

  const auto corrupted = make_robust_pca(6, 5, 2, 0.2, 3);
  CHECK(corrupted.data.constant("corrupted") == 6.0);
  const Matrix m = corrupted.data.array("M").as_matrix();
  const Matrix u = corrupted.data.array("U_true").as_matrix();
  const Matrix v = corrupted.data.array("V_true").as_matrix();
  const Matrix s = m - u * v.transpose();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double e = std::abs(s.data()[i]);
    if (e > 1e-12) {
      ++nonzero;
      CHECK(e >= 0.5);
      CHECK(e <= 1.5);
    }
  }
  CHECK(nonzero == 6);
}

TEST_CASE("z2 synchronization counts flipped edges") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = make_z2_sync(12, 0.5, 0.2, seed);
    const Matrix edges = inst.data.array("edges").as_matrix();
    const Vector obs = inst.data.array("M_obs").as_vector();
    const Vector theta = *inst.ground_truth;
    double flips = 0.0;
    for (Eigen::Index e = 0; e < edges.rows(); ++e) {
      const auto i = static_cast<Eigen::Index>(edges(e, 0)), j = static_cast<Eigen::Index>(edges(e, 1));
      CHECK(i < j);
      if (theta[i] * theta[j] != obs[e]) flips += 1.0;
    }
    CHECK(flips == inst.data.constant("flips"));
    CHECK(inst.composite->value(theta) == 2.0 * flips);
    CHECK(inst.composite->value(-theta) == 2.0 * flips);
  }
}

TEST_CASE("box constrained least norm") {
  const auto inst = make_box_nls(5, 7, 4);
  const CompositeProblem& p = *inst.composite;
  const Vector truth = *inst.ground_truth;
  CHECK(p.value(truth) <= 1e-12);
  const Vector lo = inst.data.array("lower").as_vector(), hi = inst.data.array("upper").as_vector();
  CHECK((truth.array() > lo.array()).all());
  CHECK((truth.array() < hi.array()).all());

  RandomStream rng(4, 2);
  for (int k = 0; k < 10; ++k) {
    const Vector z = 2.0 * normal_vector(rng, 5);
    CHECK(p.g->prox(0.7, z) == z.cwiseMax(lo).cwiseMin(hi));
    // grad of |c|^2 / 2 is J^T c.
    const Vector x = normal_vector(rng, 5);
    const Vector fd =
        finite_difference_gradient([&](const Vector& y) { return 0.5 * p.c->eval(y).squaredNorm(); }, x);
    CHECK((p.c->vjp(x, p.c->eval(x)) - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
  }
}

TEST_CASE("lasso without penalty on a square system") {
  const auto inst = make_lasso(8, 8, 0.0, 5);
  const CompositeProblem& p = *inst.composite;
  const Matrix a = inst.data.array("A").as_matrix();
  const Vector b = inst.data.array("b").as_vector();
  const Vector x = a.fullPivLu().solve(b);
  CHECK(p.c->vjp(x, Vector::Ones(1)).norm() <= 1e-8);
  CHECK(p.value(x) <= 1e-20);
  CHECK(p.beta == doctest::Approx(power_iteration([&](const Vector& v) { return Vector(a.transpose() * (a * v)); },
                                                  8, 2000))
                      .epsilon(1e-6));
}

TEST_CASE("finite sums") {
  const auto logistic = make_erm_logistic(6, 50, 1e-2, 6);
  const auto ridge = make_ridge(6, 50, 100.0, 6);
  RandomStream rng(6, 2);
  for (const auto* inst : {&logistic, &ridge}) {
    const FiniteSumProblem& p = *inst->finite_sum;
    const Vector x = normal_vector(rng, 6);
    Vector sum = Vector::Zero(6), g;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.component_gradient(i, x, g);
      sum += g;
    }
    CHECK((p.full_gradient(x) - sum / 50.0).norm() <= 1e-13 * (1.0 + sum.norm()));
    const Vector fd = finite_difference_gradient([&](const Vector& y) { return p.smooth_value(y); }, x);
    CHECK((p.full_gradient(x) - fd).norm() <= 1e-6 * (1.0 + fd.norm()));

    const Vector x_star = inst->data.array("x_star").as_vector();
    CHECK(p.full_gradient(x_star).norm() <= 1e-12);
    CHECK(p.value(x_star) == *inst->optimum_value);
  }
  CHECK(logistic.finite_sum->beta_component() == doctest::Approx(1.0 + 1e-2));
  const FiniteSumProblem& r = *ridge.finite_sum;
  CHECK(r.beta_full() / r.mu() == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("logistic loss saturates without overflow") {
  Matrix a(2, 1);
  a << 1.0, 1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const auto p = make_logistic_problem(a, y, 1e-3);
  const Vector x = Vector::Constant(1, 1e3);
  CHECK(p->component_value(0, x) == doctest::Approx(0.5e-3 * 1e6));
  CHECK(p->component_value(1, x) == doctest::Approx(1e3 + 0.5e-3 * 1e6));
  Vector g;
  p->component_gradient(0, x, g);
  CHECK(g[0] == doctest::Approx(1.0));
  p->component_gradient(1, x, g);
  CHECK(g[0] == doctest::Approx(2.0));
}

TEST_CASE("generators are deterministic in the seed") {
  const auto a = make_phase_retrieval(5, 30, 0.1, 9);
  const auto b = make_phase_retrieval(5, 30, 0.1, 9);
  const auto c = make_phase_retrieval(5, 30, 0.1, 10);
  CHECK(a.data.array("A").values == b.data.array("A").values);
  CHECK(a.data.array("b").values == b.data.array("b").values);
  CHECK(a.data.array("A").values != c.data.array("A").values);
}

TEST_CASE("composite maps are consistent and weakly convex") {
  for (const auto& inst : composite_instances()) {
    CAPTURE(inst.data.kind);
    CompositeProblem p = *inst.composite;
    RandomStream rng(11, 2);
    CHECK(check_adjoint(*p.c, rng, 50).worst_relative_error <= 1e-12);
    // The box indicator is infinite off the box; audit h o c alone.
    p.g = std::make_shared<ZeroFunction>();
    const CompositeObjective f(p);
    CHECK(check_weak_convexity(f, p.weak_convexity(), p.dim(), rng, 500).violations == 0);
  }
}

TEST_CASE("instance files round trip") {
  for (const auto& inst : composite_instances()) {
    CAPTURE(inst.data.kind);
    std::stringstream buffer;
    write_instance(buffer, inst.data);
    const InstanceData back = read_instance(buffer);
    CHECK(back.kind == inst.data.kind);
    CHECK(back.seed == inst.data.seed);
    CHECK(back.config == inst.data.config);
    CHECK(back.constants == inst.data.constants);
    REQUIRE(back.arrays.size() == inst.data.arrays.size());
    for (std::size_t k = 0; k < back.arrays.size(); ++k) {
      CHECK(back.arrays[k].name == inst.data.arrays[k].name);
      CHECK(back.arrays[k].rows == inst.data.arrays[k].rows);
      CHECK(back.arrays[k].values == inst.data.arrays[k].values);
    }
    const SyntheticInstance rebuilt = build_instance(back);
    RandomStream rng(12, 2);
    const Vector x = normal_vector(rng, inst.composite->dim());
    CHECK(rebuilt.composite->value(x) == inst.composite->value(x));
  }
  std::stringstream junk("not an instance\n");
  CHECK_THROWS(read_instance(junk));
}
