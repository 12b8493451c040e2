#pragma once

#include <cstdint>
#include <string>

#include "asparent/parent.hpp"

namespace asparent {

/// Covariance build under a finite-shot measurement model. Every expectation
/// is the mean of n_shot independent +/-1 draws:
///   - b_i from <P_i>;
///   - for commuting pairs, P_i P_j = sign * Q with a real sign, and <Q> is
///     sampled the same way;
///   - anticommuting pairs have exactly zero symmetric part, so
///     A_ij = -b_i b_j inherits noise only through b.
/// Entry streams are seeded from (seed, i, j), so results are deterministic
/// regardless of evaluation order.
CovarianceData sample_covariance(const std::vector<PauliTerm>& pauli_set,
                                 const StateVector& psi, long long n_shot,
                                 std::uint64_t seed);

/// Davis-Kahan comparison of the exact and sampled kernels. With
/// gamma = smallest exact eigenvalue above delta, Pi_K the exact spectral
/// projector on [gamma, inf) and Pt the sampled projector on (-inf, delta]:
///   || Pi_K Pt || <= ||dA|| / (gamma - delta).
struct DavisKahanReport {
  bool applicable = true;   // false when no exact eigenvalue exceeds delta
  double delta = 0.0;
  double gamma = 0.0;
  int exact_kernel_dim = 0;
  int sampled_kernel_dim = 0;
  double perturbation_spectral = 0.0;   // ||dA||_2
  double perturbation_frobenius = 0.0;  // ||dA||_F
  double measured_overlap = 0.0;        // ||Pi_K Pt||_2
  double bound = 0.0;
  bool vacuous = false;  // bound >= 1 exceeds the projector-product ceiling
  bool pass = false;     // measured <= bound + 1e-10
  std::string note;
};

DavisKahanReport davis_kahan_check(const CovarianceData& exact,
                                   const CovarianceData& sampled, double delta);

struct NoiseStudy {
  CovarianceData exact;
  CovarianceData sampled;
  long long shots = 0;
  std::uint64_t seed = 0;
  double perturbation_spectral = 0.0;
  double perturbation_frobenius = 0.0;
  /// First-order prediction of E||dA||_F^2 from the per-entry estimator
  /// variances (the i.i.d.-entries estimate sigma^2 m^2 / N_shot, with the
  /// single sigma replaced by the actual per-entry variances).
  double predicted_frobenius_sq = 0.0;
  DavisKahanReport davis_kahan;
};

NoiseStudy run_noise_study(const std::vector<PauliTerm>& pauli_set,
                           const StateVector& psi, long long n_shot,
                           std::uint64_t seed, double delta);

/// JSON rendering used by the CLI `noise-study` subcommand.
std::string noise_study_json(const NoiseStudy& study);

}  // namespace asparent
