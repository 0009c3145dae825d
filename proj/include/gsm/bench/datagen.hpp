#pragma once

// Random sensing matrices, sparse signals and noise for the recovery
// experiments. All functions are deterministic given the seed.

#include "gsm/types.hpp"

#include <cstdint>
#include <string>

namespace gsm {

enum class MatrixKind { Uncorrelated, Correlated };
enum class SignalKind { Gaussian, EquispacedLinear, EquispacedPm1 };

MatrixKind parse_matrix_kind(const std::string& s);
SignalKind parse_signal_kind(const std::string& s);
std::string to_string(MatrixKind kind);
std::string to_string(SignalKind kind);

// Rows drawn from N(0, Sigma) with Sigma_ij = rho^|i-j|, generated as an AR(1)
// process along each row; rho is ignored for uncorrelated matrices.
Matrix gen_matrix(MatrixKind kind, Index n, Index d, double rho, std::uint64_t seed, bool normalize = true);

// Exactly k nonzeros. Equispaced supports sit at floor(i d / k), i = 0..k-1.
Vector gen_signal(SignalKind kind, Index d, Index k, std::uint64_t seed);

// E ||A x||^2 over signals of the given kind, from `draws` Monte Carlo samples.
double expected_signal_energy(const Matrix& A, SignalKind kind, Index k, std::uint64_t seed, int draws = 2000);

// Gaussian noise with variance nu^2 E||A x||^2 / n.
Vector gen_noise(const Matrix& A, SignalKind kind, Index k, double nu, std::uint64_t seed, int mc_draws = 2000);

// Gaussian direction scaled to norm ratio * ||signal||.
Vector gen_relative_noise(const Vector& signal, double ratio, std::uint64_t seed);

// Seed for one (k, trial) instance of an experiment.
std::uint64_t instance_seed(std::uint64_t seed, Index k, Index trial);

}  // namespace gsm
