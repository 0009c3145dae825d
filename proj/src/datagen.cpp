#include "gsm/bench/datagen.hpp"

#include "gsm/bench/rng.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace gsm {

MatrixKind parse_matrix_kind(const std::string& s) {
  if (s == "uncorrelated") return MatrixKind::Uncorrelated;
  if (s == "correlated") return MatrixKind::Correlated;
  throw ConfigError("unknown matrix kind '" + s + "'");
}

SignalKind parse_signal_kind(const std::string& s) {
  if (s == "gaussian") return SignalKind::Gaussian;
  if (s == "equispaced_linear") return SignalKind::EquispacedLinear;
  if (s == "equispaced_pm1") return SignalKind::EquispacedPm1;
  throw ConfigError("unknown signal kind '" + s + "'");
}

std::string to_string(MatrixKind kind) { return kind == MatrixKind::Uncorrelated ? "uncorrelated" : "correlated"; }

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Gaussian:
      return "gaussian";
    case SignalKind::EquispacedLinear:
      return "equispaced_linear";
    case SignalKind::EquispacedPm1:
      return "equispaced_pm1";
  }
  return "gaussian";
}

Matrix gen_matrix(MatrixKind kind, Index n, Index d, double rho, std::uint64_t seed, bool normalize) {
  if (n < 1 || d < 1) throw ConfigError("gen_matrix: requires n, d >= 1");
  if (kind == MatrixKind::Correlated && !(rho >= 0.0 && rho < 1.0)) throw ConfigError("gen_matrix: rho must lie in [0, 1)");
  const double r = kind == MatrixKind::Correlated ? rho : 0.0;
  const double s = std::sqrt(1.0 - r * r);
  CounterRng rng(derive_key(seed, StreamTag::Matrix));
  Matrix A(n, d);
  for (Index i = 0; i < n; ++i) {
    double prev = rng.normal();
    A(i, 0) = prev;
    for (Index j = 1; j < d; ++j) {
      prev = r * prev + s * rng.normal();
      A(i, j) = prev;
    }
  }
  if (normalize) {
    for (Index j = 0; j < d; ++j) {
      const double nj = A.col(j).norm();
      if (!(nj > 0.0)) throw NumericError("gen_matrix: zero column");
      A.col(j) /= nj;
    }
  }
  return A;
}

namespace {

Vector draw_signal(SignalKind kind, Index d, Index k, CounterRng& rng) {
  Vector x = Vector::Zero(d);
  if (kind == SignalKind::Gaussian) {
    // Partial Fisher-Yates shuffle for the support.
    std::vector<Index> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - i)));
      std::swap(idx[i], idx[j]);
    }
    for (Index i = 0; i < k; ++i) {
      double v = rng.normal();
      while (v == 0.0) v = rng.normal();
      x[idx[i]] = v;
    }
    return x;
  }
  std::vector<double> mags(static_cast<std::size_t>(k), 1.0);
  if (kind == SignalKind::EquispacedLinear) {
    for (Index i = 0; i < k; ++i) mags[i] = k > 1 ? 1.0 + static_cast<double>(i) / static_cast<double>(k - 1) * 29.0 : 1.0;
    for (Index i = k - 1; i > 0; --i) std::swap(mags[i], mags[rng.below(static_cast<std::uint64_t>(i + 1))]);
  }
  for (Index i = 0; i < k; ++i) x[i * d / k] = rng.sign() * mags[i];
  return x;
}

}  // namespace

Vector gen_signal(SignalKind kind, Index d, Index k, std::uint64_t seed) {
  if (k < 1 || k > d) throw ConfigError("gen_signal: requires 1 <= k <= d");
  CounterRng rng(derive_key(seed, StreamTag::Signal));
  return draw_signal(kind, d, k, rng);
}

double expected_signal_energy(const Matrix& A, SignalKind kind, Index k, std::uint64_t seed, int draws) {
  if (draws < 1) throw ConfigError("expected_signal_energy: draws must be >= 1");
  if (k < 1 || k > A.cols()) throw ConfigError("expected_signal_energy: requires 1 <= k <= d");
  CounterRng rng(derive_key(seed, StreamTag::MonteCarlo));
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) sum += (A * draw_signal(kind, A.cols(), k, rng)).squaredNorm();
  return sum / draws;
}

Vector gen_noise(const Matrix& A, SignalKind kind, Index k, double nu, std::uint64_t seed, int mc_draws) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("gen_noise: nu must lie in [0, 1]");
  const Index n = A.rows();
  if (nu == 0.0) return Vector::Zero(n);
  const double sigma = nu * std::sqrt(expected_signal_energy(A, kind, k, seed, mc_draws) / static_cast<double>(n));
  CounterRng rng(derive_key(seed, StreamTag::Noise));
  Vector e(n);
  for (Index i = 0; i < n; ++i) e[i] = sigma * rng.normal();
  return e;
}

Vector gen_relative_noise(const Vector& signal, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0)) throw ConfigError("gen_relative_noise: ratio must be >= 0");
  CounterRng rng(derive_key(seed, StreamTag::Noise));
  Vector e(signal.size());
  for (Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
  const double ne = e.norm();
  return ne > 0.0 ? Vector(e * (ratio * signal.norm() / ne)) : Vector(e);
}

std::uint64_t instance_seed(std::uint64_t seed, Index k, Index trial) {
  return derive_key(seed, StreamTag::Instance,
                    (static_cast<std::uint64_t>(k) << 32) ^ static_cast<std::uint64_t>(trial));
}

}  // namespace gsm
