#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsm/kernel.hpp"
#include "gsm/kernel_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace gsm;

namespace {

Vector uniform_vector(std::mt19937_64& rng, Index d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector z(d);
  for (Index i = 0; i < d; ++i) z[i] = u(rng);
  return z;
}

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Sum of the q largest entries.
double top_sum(Vector v, Index q) {
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v.head(q).sum();
}

}  // namespace

TEST_CASE("mu_btable matches direct enumeration on three entries") {
  Vector z(3);
  z << 1, 2, 3;
  auto r = mu_btable(z, 2, 2, 1.0);
  const double expected = std::log((std::exp(3.0) + std::exp(4.0) + std::exp(5.0)) / 3.0);
  CHECK(r.mu == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.btable.b[0] == 0.0);
  CHECK(r.btable.zsorted[1] == 3.0);
  CHECK(r.btable.zsorted[2] == 2.0);
}

TEST_CASE("mu_btable on a constant vector") {
  Vector z = Vector::Constant(7, 0.37);
  for (double g : {1e-3, 1.0, 50.0}) {
    auto r = mu_btable(z, 3, 5, g);
    CHECK(r.mu == doctest::Approx(3 * 0.37).epsilon(1e-14));
    for (double b : r.btable.b) CHECK(std::abs(b) < 1e-15);
  }
}

TEST_CASE("mu_btable small gamma limit") {
  Vector z(3);
  z << 1, 2, 3;
  CHECK(mu_btable(z, 2, 3, 1e-12).mu == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("mu_btable table invariants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 40;
    Vector z = uniform_vector(rng, d, -3, 3);
    auto r = mu_btable(z, 5, 12, 2.5);
    CHECK(r.btable.b[0] == 0.0);
    for (Index q = 1; q <= 12; ++q) {
      CHECK(r.btable.b[q] <= 1e-15);
      CHECK(r.btable.b[q] >= -static_cast<double>(q) * std::log(static_cast<double>(d)));
      if (q >= 2) CHECK(r.btable.zsorted[q] <= r.btable.zsorted[q - 1]);
    }
  }
}

TEST_CASE("mu_btable argument checks") {
  Vector z = Vector::Ones(4);
  CHECK_THROWS_AS(mu_btable(z, 3, 2, 1.0), ConfigError);
  CHECK_THROWS_AS(mu_btable(z, 1, 5, 1.0), ConfigError);
  CHECK_THROWS_AS(mu_btable(z, 1, 2, 0.0), ConfigError);
  z[1] = std::nan("");
  CHECK_THROWS_AS(mu_btable(z, 1, 2, 1.0), NumericError);
}

TEST_CASE("mu_theta special cases") {
  Vector z(4);
  z << 0.4, 0.1, 0.9, 0.2;
  auto r = mu_theta(z, 2, 0.0);
  CHECK(r.mu == doctest::Approx(0.8).epsilon(1e-15));
  for (Index i = 0; i < 4; ++i) CHECK(r.theta[i] == 0.5);

  Vector ones = Vector::Ones(2);
  auto t = mu_theta(ones, 1, kInf);
  CHECK(t.mu == 1.0);
  CHECK(t.theta[0] == 0.5);
  CHECK(t.theta[1] == 0.5);

  auto zero = mu_theta(z, 0, 3.0);
  CHECK(zero.mu == 0.0);
  CHECK(zero.theta.isZero());

  CHECK_THROWS_AS(mu_theta(z, 3, 1.0), ConfigError);
  CHECK_THROWS_AS(mu_theta(z, 1, -1.0), ConfigError);
}

TEST_CASE("mu_theta matches brute force on a random 12-vector") {
  std::mt19937_64 rng(3);
  Vector z = uniform_vector(rng, 12);
  auto r = mu_theta(z, 3, 5.0);
  auto b = brute_force_mu_theta(z, 3, 5.0);
  CHECK(std::abs(r.mu - b.mu) <= 1e-10);
  CHECK(max_abs_diff(r.theta, b.theta) <= 1e-10);
}

TEST_CASE("mu_theta_full complements and signs") {
  std::mt19937_64 rng(5);
  Vector z = uniform_vector(rng, 10, -1, 2);
  auto all = mu_theta_full(z, 10, 3.0);
  CHECK(all.mu == doctest::Approx(z.sum()).epsilon(1e-14));
  for (Index i = 0; i < 10; ++i) CHECK(all.theta[i] == 1.0);

  Vector s(3);
  s << 1, 2, 3;
  CHECK(mu_theta_full(s, 2, -kInf).mu == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mu_theta_full(s, 2, kInf).mu == doctest::Approx(5.0).epsilon(1e-15));

  auto a = mu_theta_full(z, 7, 2.0);
  auto c = mu_theta_full(z, 3, -2.0);
  CHECK(std::abs(a.mu + c.mu - z.sum()) <= 1e-12);
  CHECK(max_abs_diff(a.theta + c.theta, Vector::Ones(10)) <= 1e-12);

  auto bf = brute_force_mu_theta(z, 7, 2.0);
  CHECK(std::abs(a.mu - bf.mu) <= 1e-10 * std::max(1.0, std::abs(bf.mu)));
  CHECK(max_abs_diff(a.theta, bf.theta) <= 1e-10);
}

TEST_CASE("theta_forward single order and symmetry") {
  std::mt19937_64 rng(7);
  Vector z = uniform_vector(rng, 9);
  const double g = 2.0;
  auto t = mu_btable(z, 1, 1, g);
  for (Index i = 0; i < 9; ++i) {
    const double expected = std::exp(g * (z[i] - t.btable.zsorted[1]) - t.btable.b[1]) / 9.0;
    CHECK(theta_forward(i, 1, g, t.btable, z) == doctest::Approx(expected).epsilon(1e-14));
  }
  Vector c = Vector::Constant(8, -0.3);
  auto tc = mu_btable(c, 3, 3, 4.0);
  for (Index i = 0; i < 8; ++i) CHECK(theta_forward(i, 3, 4.0, tc.btable, c) == doctest::Approx(3.0 / 8.0));
}

TEST_CASE("theta_forward matches brute force for d=8, k=2") {
  std::mt19937_64 rng(9);
  Vector z = uniform_vector(rng, 8);
  auto t = mu_btable(z, 2, 2, 3.0);
  auto b = brute_force_mu_theta(z, 2, 3.0);
  for (Index i = 0; i < 8; ++i) CHECK(std::abs(theta_forward(i, 2, 3.0, t.btable, z) - b.theta[i]) <= 1e-12);
}

TEST_CASE("theta_backward_left") {
  Vector one(1);
  one << 0.7;
  auto t1 = mu_btable(one, 1, 1, 2.0);
  auto th1 = theta_backward_left(0, 1, 2.0, t1.btable, one);
  CHECK(th1[1] == doctest::Approx(1.0).epsilon(1e-15));

  Vector eq = Vector::Constant(6, 1.5);
  auto te = mu_btable(eq, 6, 6, 10.0);
  auto the = theta_backward_left(2, 4, 10.0, te.btable, eq);
  for (Index q = 0; q <= 4; ++q) CHECK(the[q] == doctest::Approx(static_cast<double>(q) / 6.0).epsilon(1e-13));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Vector zl = uniform_vector(rng, 6);
    auto tl = mu_btable(zl, 6, 6, 10.0);
    for (Index i = 0; i < 6; ++i) {
      auto th = theta_backward_left(i, 4, 10.0, tl.btable, zl);
      CHECK(th[0] == 0.0);
      for (Index q = 1; q <= 4; ++q) {
        auto b = brute_force_mu_theta(zl, q, 10.0);
        CHECK(std::abs(th[q] - b.theta[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("delta_table examples and direct definition") {
  Vector u(2), v(1);
  u << 3, 1;
  v << 2;
  auto d1 = delta_table(u, v, 2);
  CHECK(d1[1] == 0.0);
  Vector u2(2), v2(1);
  u2 << 1, 0;
  v2 << 5;
  auto d2 = delta_table(u2, v2, 1);
  CHECK(d2[1] == 4.0);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 2 + static_cast<Index>(rng() % 6), n = 1 + static_cast<Index>(rng() % 6);
    Vector a = uniform_vector(rng, m, -2, 2), b = uniform_vector(rng, n, -2, 2);
    if (trial % 3 == 0) a[0] = b[0];
    Vector z(m + n);
    z << a, b;
    for (Index q = 1; q <= m; ++q) {
      auto dt = delta_table(a, b, q);
      for (Index t = std::max<Index>(0, q - n); t <= q; ++t) {
        const double direct = top_sum(z, q) - (t > 0 ? top_sum(a, t) : 0.0) - (q - t > 0 ? top_sum(b, q - t) : 0.0);
        CHECK(dt[t] >= 0.0);
        CHECK(std::abs(dt[t] - direct) <= 1e-12);
      }
    }
  }
}

TEST_CASE("two_set_binom") {
  CHECK(two_set_binom(2, 2, 2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(two_set_binom(6, 8, 3, 0) == doctest::Approx(56.0 / 364.0).epsilon(1e-14));
  CHECK(two_set_binom(3, 1, 3, 1) == 0.0);
  CHECK(two_set_binom(3, 1, 3, 2) == doctest::Approx(3.0 / 4.0).epsilon(1e-14));
  double total = 0.0;
  for (Index t = 0; t <= 5; ++t) total += two_set_binom(7, 4, 5, t);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("theta_convert on a 6|8 split") {
  std::mt19937_64 rng(19);
  const Index k = 3;
  const double g = 4.0;
  Vector z = uniform_vector(rng, 14);
  std::sort(z.data(), z.data() + 14, std::greater<double>());
  Vector zl = z.head(6), zr = z.tail(8);
  auto full = mu_btable(z, k, k, g).btable;
  auto left = mu_btable(zl, 6, 6, g).btable;
  auto right = mu_btable(zr, k, k, g).btable;
  auto delta = delta_table(zl, zr, k);
  auto bf = brute_force_mu_theta(z, k, g);
  for (Index i = 0; i < 6; ++i) {
    std::vector<double> thl(k + 1, 0.0);
    for (Index q = 1; q <= k; ++q) thl[q] = brute_force_mu_theta(zl, q, g).theta[i];
    CHECK(std::abs(theta_convert(k, g, full, left, right, delta, thl) - bf.theta[i]) <= 1e-12);
  }
}

TEST_CASE("tau_and_weights examples") {
  Vector x(3);
  x << 3, -1, 2;
  auto tw = tau_and_weights(x, 1, kInf);
  CHECK(tw.tau == 3.0);
  CHECK(tw.w[0] == 0.0);
  CHECK(tw.w[1] == 1.0);
  CHECK(tw.w[2] == 1.0);

  auto t0 = tau_and_weights(x, 1, 0.0);
  CHECK(t0.tau == doctest::Approx(2.0 / 3.0 * 6.0).epsilon(1e-15));
  for (Index i = 0; i < 3; ++i) CHECK(t0.w[i] == doctest::Approx(2.0 / 3.0));

  Vector ties(4);
  ties << 1, -1, 0.5, 1;
  auto tt = tau_and_weights(ties, 2, kInf);
  CHECK(tt.tau == doctest::Approx(1.5));
  CHECK(tt.w[0] == doctest::Approx(1.0 / 3.0));
  CHECK(tt.w[2] == 1.0);
  CHECK(tt.w.sum() == doctest::Approx(2.0));

  std::mt19937_64 rng(23);
  const double bound = std::log(120.0) / 7.0;
  for (int trial = 0; trial < 50; ++trial) {
    Vector r = uniform_vector(rng, 10, -2, 2);
    const double tk = tau_and_weights(r, 3, kInf).tau;
    auto tg = tau_and_weights(r, 3, 7.0);
    CHECK(tg.tau >= tk - 1e-12);
    CHECK(tg.tau <= tk + bound + 1e-12);
    CHECK(tg.w.sum() == doctest::Approx(7.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tau_and_weights(x, 3, 1.0), ConfigError);
}

TEST_CASE("oracle equivalence for d <= 18") {
  std::mt19937_64 rng(29);
  const double gammas[] = {1e-5, 0.5, 2.0, 10.0, 1e3};
  for (Index d : {2, 3, 5, 8, 13, 18}) {
    for (Index k = 1; k <= d / 2; ++k) {
      if (d == 18 && k % 3 != 0) continue;
      for (double g : gammas) {
        Vector z = (rng() % 2) ? uniform_vector(rng, d) : uniform_vector(rng, d, -5, 5);
        auto r = mu_theta(z, k, g);
        auto b = brute_force_mu_theta(z, k, g);
        CHECK(std::abs(r.mu - b.mu) <= 1e-10 * std::max(1.0, std::abs(r.mu)));
        CHECK(max_abs_diff(r.theta, b.theta) <= 1e-10);
        CHECK(r.clamp_excursion < 1e-9);
      }
    }
  }
}

TEST_CASE("naive recursion agrees in its safe regime") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 6 + static_cast<Index>(rng() % 10);
    const Index k = 1 + static_cast<Index>(rng() % (d / 2));
    Vector z = uniform_vector(rng, d);
    const double g = 0.5 + static_cast<double>(trial % 3);
    auto n = naive_recursion_mu_theta(z, k, g);
    auto r = mu_theta(z, k, g);
    auto b = brute_force_mu_theta(z, k, g);
    CHECK(std::abs(n.mu - b.mu) <= 1e-10 * std::max(1.0, std::abs(b.mu)));
    CHECK(max_abs_diff(n.theta, b.theta) <= 1e-10);
    CHECK(std::abs(n.mu - r.mu) <= 1e-10 * std::max(1.0, std::abs(b.mu)));
  }
  Vector wide(4);
  wide << 0, 100, 200, 300;
  CHECK_THROWS_AS(naive_recursion_mu_theta(wide, 2, 10.0), NumericError);
}

TEST_CASE("high-precision path") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 4 + static_cast<Index>(rng() % 14);
    const Index k = 1 + static_cast<Index>(rng() % (d / 2));
    Vector z = uniform_vector(rng, d);
    const double g = std::pow(10.0, static_cast<double>(trial % 5) - 1.0);
    auto h = highprec_mu_theta(z, k, g);
    auto b = brute_force_mu_theta(z, k, g);
    CHECK(std::abs(h.rounded.mu - b.mu) <= 1e-14 * std::max(1.0, std::abs(b.mu)));
    CHECK(max_abs_diff(h.rounded.theta, b.theta) <= 1e-14);
    Vector c = Vector::Constant(d, 0.25);
    auto hc = highprec_mu_theta(c, k, g);
    CHECK(hc.rounded.mu == doctest::Approx(0.25 * static_cast<double>(k)).epsilon(1e-16));
  }
}

TEST_CASE("complement identity residuals") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 60);
    const Index k = static_cast<Index>(rng() % (d + 1));
    const double g = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(rng() % 1000) / 1000.0);
    Vector z = uniform_vector(rng, d, -3, 3);
    auto a = mu_theta_full(z, k, g);
    auto c = mu_theta_full(z, d - k, -g);
    CHECK(std::abs(a.mu + c.mu - z.sum()) <= 1e-10 * (1.0 + std::abs(z.sum())));
    CHECK(max_abs_diff(a.theta + c.theta, Vector::Ones(d)) <= 1e-10);
    CHECK(std::abs(a.theta.sum() - static_cast<double>(k)) <= 1e-9 * static_cast<double>(d));
  }
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 5 + static_cast<Index>(rng() % 30);
    const Index k = 1 + static_cast<Index>(rng() % (d / 2));
    const double g = 0.3 + static_cast<double>(rng() % 100) / 10.0;
    Vector z = uniform_vector(rng, d);
    auto r = mu_theta(z, k, g);
    const double h = 1e-6;
    for (Index i = 0; i < d; ++i) {
      Vector zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double fd = (mu_theta(zp, k, g).mu - mu_theta(zm, k, g).mu) / (2 * h);
      CHECK(std::abs(fd - r.theta[i]) <= 1e-6 * std::max(r.theta[i], 1e-3));
    }
  }
}

TEST_CASE("mu is nondecreasing in gamma") {
  std::mt19937_64 rng(47);
  const double grid[] = {0.0, 0.1, 1.0, 10.0, 100.0, kInf};
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + static_cast<Index>(rng() % 40);
    const Index k = 1 + static_cast<Index>(rng() % (d / 2));
    Vector z = uniform_vector(rng, d, -1, 1);
    double prev = -kInf;
    for (double g : grid) {
      const double mu = mu_theta(z, k, g).mu;
      CHECK(mu >= prev - 1e-12 * std::max(1.0, std::abs(mu)));
      prev = mu;
    }
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 3 + static_cast<Index>(rng() % 40);
    const Index k = 1 + static_cast<Index>(rng() % (d / 2));
    Vector z = uniform_vector(rng, d);
    if (trial % 4 == 0) z[1] = z[0];
    std::vector<Index> p(d);
    std::iota(p.begin(), p.end(), Index{0});
    std::shuffle(p.begin(), p.end(), rng);
    Vector zp(d);
    for (Index i = 0; i < d; ++i) zp[i] = z[p[i]];
    for (double g : {0.0, 0.7, 30.0, kInf}) {
      auto a = mu_theta(z, k, g), b = mu_theta(zp, k, g);
      CHECK(std::abs(a.mu - b.mu) <= 1e-12 * std::max(1.0, std::abs(a.mu)));
      for (Index i = 0; i < d; ++i) CHECK(std::abs(b.theta[i] - a.theta[p[i]]) <= 1e-12);
    }
  }
}

TEST_CASE("extreme gamma values stay finite") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    Vector z = uniform_vector(rng, 300);
    for (Index k : {1, 2, 10, 100, 150}) {
      for (double g : {1e-20, 1e-10, 1e10, 1e20}) {
        auto r = mu_theta(z, k, g);
        CHECK(std::isfinite(r.mu));
        CHECK(r.theta.allFinite());
        CHECK(r.theta.minCoeff() >= 0.0);
        CHECK(r.theta.maxCoeff() <= 1.0);
        CHECK(r.clamp_excursion < 1e-9);
        CHECK(std::abs(r.theta.sum() - static_cast<double>(k)) <= 1e-9 * 300);
      }
    }
    auto tiny = mu_theta(z, 10, 1e-20);
    CHECK(tiny.mu == doctest::Approx(10.0 / 300.0 * z.sum()).epsilon(1e-10));
  }
}

TEST_CASE("large d agrees with the double-double path") {
  std::mt19937_64 rng(61);
  Vector z = uniform_vector(rng, 1000);
  for (Index k : {10, 100}) {
    for (double g : {1e-5, 0.6, 8.0, 1e2, 1e5}) {
      auto r = mu_theta(z, k, g);
      auto h = highprec_mu_theta(z, k, g);
      CHECK(std::abs(r.mu - h.rounded.mu) <= 1e-12 * std::abs(h.rounded.mu));
      CHECK(max_abs_diff(r.theta, h.rounded.theta) / static_cast<double>(k) <= 1e-11);
    }
  }
}
