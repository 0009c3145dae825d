#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsm/kernel.hpp"
#include "gsm/objective.hpp"

#include <cmath>
#include <random>

using namespace gsm;

namespace {

Matrix gaussian_matrix(std::mt19937_64& rng, Index n, Index d) {
  std::normal_distribution<double> g;
  Matrix A(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) A(i, j) = g(rng);
  return A;
}

Vector gaussian_vector(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST_CASE("thresholds on the identity") {
  Matrix A = Matrix::Identity(2, 2);
  Vector y(2);
  y << 3.0, 4.0;
  ProblemInstance p(A, y, 1);
  const auto t = thresholds(p);
  CHECK(t.lambda_bar == doctest::Approx(5.0));
  CHECK(t.lambda_b == doctest::Approx(1.0));
  CHECK(t.lambda_a == doctest::Approx(1.0));
}

TEST_CASE("rank deficient and tall matrices have lambda_a = 0") {
  Matrix A(2, 3);
  A << 1, 2, 3, 2, 4, 6;
  ProblemInstance p(A, Vector::Ones(2), 1);
  CHECK(thresholds(p).lambda_a == 0.0);
  std::mt19937_64 rng(3);
  ProblemInstance tall(gaussian_matrix(rng, 5, 3), Vector::Ones(5), 1);
  CHECK(tall.sigma_n() == 0.0);
}

TEST_CASE("problem instance validation") {
  std::mt19937_64 rng(1);
  Matrix A = gaussian_matrix(rng, 3, 4);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Ones(2), 1), ConfigError);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Ones(3), 0), ConfigError);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Ones(3), 4), ConfigError);
  Matrix Z = A;
  Z.col(2).setZero();
  CHECK_THROWS_AS(ProblemInstance(Z, Vector::Ones(3), 1), ConfigError);
  Matrix N = A;
  N(0, 0) = std::nan("");
  CHECK_THROWS_AS(ProblemInstance(N, Vector::Ones(3), 1), NumericError);
}

TEST_CASE("spectral norm bound") {
  std::mt19937_64 rng(2);
  for (auto [n, d] : {std::pair<Index, Index>{20, 50}, {50, 20}}) {
    ProblemInstance p(gaussian_matrix(rng, n, d), Vector::Ones(n), 3);
    Eigen::JacobiSVD<Matrix> svd(p.A());
    const double s1 = svd.singularValues()[0];
    CHECK(p.spec_norm_sq() >= s1 * s1);
    CHECK(p.spec_norm_sq() <= 1.02 * s1 * s1);
  }
}

TEST_CASE("trimmed lasso and projection examples") {
  Vector x(3);
  x << 3.0, -1.0, 2.0;
  CHECK(trimmed_lasso(x, 1) == doctest::Approx(3.0));
  CHECK(trimmed_lasso(x, 0) == doctest::Approx(6.0));
  CHECK(trimmed_lasso(x, 3) == 0.0);
  Vector px = proj_k(x, 2);
  CHECK(px[0] == 3.0);
  CHECK(px[1] == 0.0);
  CHECK(px[2] == 2.0);
  CHECK(count_nonzeros(px) == 2);
  CHECK(is_k_sparse(px, 2));
  CHECK_FALSE(is_k_sparse(x, 2));
}

TEST_CASE("top-k support breaks ties by lowest index") {
  Vector x(5);
  x << 1.0, -2.0, 2.0, 0.5, -2.0;
  const auto s = top_k_support(x, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == 1);
  CHECK(s[1] == 2);
  const Vector p = proj_k(x, 2);
  CHECK(trimmed_lasso(x, 2) == doctest::Approx((x - p).cwiseAbs().sum()));
}

TEST_CASE("trimmed lasso equals the distance to k-sparse vectors") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = gaussian_vector(rng, 30);
    for (Index k : {1, 5, 29}) CHECK(trimmed_lasso(x, k) == doctest::Approx((x - proj_k(x, k)).lpNorm<1>()));
  }
}

TEST_CASE("objective at gamma infinity is the trimmed lasso objective") {
  std::mt19937_64 rng(5);
  ProblemInstance p(gaussian_matrix(rng, 10, 20), gaussian_vector(rng, 10), 3);
  Vector x = gaussian_vector(rng, 20);
  const double r = (p.A() * x - p.y()).norm();
  CHECK(objective_value(p, x, 0.7, kInf, Power::One) == doctest::Approx(r + 0.7 * trimmed_lasso(x, 3)));
  CHECK(objective_value(p, x, 0.7, kInf, Power::Two) == doctest::Approx(0.5 * r * r + 0.7 * trimmed_lasso(x, 3)));
  CHECK_THROWS_AS(objective_value(p, x, -1.0, 1.0, Power::Two), ConfigError);
}

TEST_CASE("gsm penalty lies between the trimmed lasso and its gamma = 0 value") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x = gaussian_vector(rng, 20);
    const double lo = trimmed_lasso(x, 4), hi = x.lpNorm<1>() * 16.0 / 20.0;
    double prev = hi;
    for (double g : {0.1, 1.0, 10.0, 100.0}) {
      const double t = tau_and_weights(x, 4, g).tau;
      CHECK(t >= lo - 1e-12);
      CHECK(t <= prev + 1e-12);
      prev = t;
    }
  }
}

TEST_CASE("majorizer bounds the objective and touches at the reference point") {
  std::mt19937_64 rng(7);
  ProblemInstance p(gaussian_matrix(rng, 12, 25), gaussian_vector(rng, 12), 5);
  for (int trial = 0; trial < 30; ++trial) {
    Vector x = gaussian_vector(rng, 25), xr = gaussian_vector(rng, 25);
    for (double g : {0.05, 1.0, 20.0, kInf}) {
      for (Power pw : {Power::One, Power::Two}) {
        const double f = objective_value(p, x, 0.8, g, pw);
        const double m = majorizer_value(p, x, xr, 0.8, g, pw);
        CHECK(m >= f - 1e-10 * std::max(1.0, std::abs(f)));
        const double fr = objective_value(p, xr, 0.8, g, pw);
        CHECK(majorizer_value(p, xr, xr, 0.8, g, pw) == doctest::Approx(fr).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("alpha2k lower bound") {
  Matrix Q = Matrix::Identity(6, 6);
  ProblemInstance orth(Q.leftCols(6), Vector::Ones(6), 2);
  CHECK(alpha2k_lower_bound(orth) == doctest::Approx(1.0 / 2.0));
  Matrix A = Matrix::Identity(6, 5);
  A.col(4) = A.col(0);
  ProblemInstance dup(A, Vector::Ones(6), 1);
  CHECK(alpha2k_lower_bound(dup) == doctest::Approx(0.0).epsilon(1e-12));
  std::mt19937_64 rng(8);
  ProblemInstance big(gaussian_matrix(rng, 50, 200), Vector::Ones(50), 10);
  CHECK_THROWS_AS(alpha2k_lower_bound(big), ConfigError);
}
