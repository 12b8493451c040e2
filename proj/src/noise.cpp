#include "asparent/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <json.hpp>

namespace asparent {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t state) {
  state += 0x9E3779B97F4A7C15ULL;
  state = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9ULL;
  state = (state ^ (state >> 27)) * 0x94D049BB133111EBULL;
  return state ^ (state >> 31);
}

/// Stream seed for entry (i, j): independent of evaluation order.
std::uint64_t entry_seed(std::uint64_t seed, int i, int j) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1)));
  h = splitmix64(h ^ (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(j + 1)));
  return h;
}

/// Mean of n_shot +/-1 draws with the given expectation. Eigenstate outcomes
/// (expectation at +/-1) are deterministic regardless of the shot count.
double sample_mean(double expectation_value, long long n_shot, std::uint64_t seed) {
  const double clamped = std::clamp(expectation_value, -1.0, 1.0);
  if (clamped >= 1.0 - 1e-12) return 1.0;
  if (clamped <= -1.0 + 1e-12) return -1.0;
  const double p = 0.5 * (1.0 + clamped);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<long long> binomial(n_shot, p);
  const long long successes = binomial(rng);
  return 2.0 * static_cast<double>(successes) / static_cast<double>(n_shot) - 1.0;
}

double spectral_norm(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  require(solver.info() == Eigen::Success, ErrorCode::kNumeric,
          "eigendecomposition failed while computing a spectral norm");
  const Eigen::VectorXd& values = solver.eigenvalues();
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

}  // namespace

CovarianceData sample_covariance(const std::vector<PauliTerm>& pauli_set,
                                 const StateVector& psi, long long n_shot,
                                 std::uint64_t seed) {
  require(n_shot >= 1, ErrorCode::kInvalidArgument, "shot count must be >= 1");
  // Exact quantities drive the measurement distributions.
  const CovarianceData exact = build_covariance(pauli_set, psi);
  const int m = exact.size();

  Eigen::VectorXd b_hat(m);
  for (int i = 0; i < m; ++i)
    b_hat(i) = sample_mean(exact.b(i), n_shot, entry_seed(seed, i, i));

  Eigen::MatrixXd a_hat(m, m);
  for (int i = 0; i < m; ++i) {
    a_hat(i, i) = 1.0 - b_hat(i) * b_hat(i);
    for (int j = i + 1; j < m; ++j) {
      double symmetric_part = 0.0;
      if (commutes(pauli_set[static_cast<std::size_t>(i)],
                   pauli_set[static_cast<std::size_t>(j)])) {
        // Re<P_i P_j> = A_ij + b_i b_j is the expectation of the (signed)
        // product Pauli; sample it with its own shot budget.
        const double product_expectation = exact.a(i, j) + exact.b(i) * exact.b(j);
        symmetric_part = sample_mean(product_expectation, n_shot, entry_seed(seed, i, j));
      }
      a_hat(i, j) = a_hat(j, i) = symmetric_part - b_hat(i) * b_hat(j);
    }
  }

  CovarianceData sampled;
  sampled.pauli_set = pauli_set;
  sampled.a = std::move(a_hat);
  sampled.b = std::move(b_hat);
  sampled.shots = n_shot;
  sampled.source_state_id = exact.source_state_id;
  return sampled;
}

DavisKahanReport davis_kahan_check(const CovarianceData& exact,
                                   const CovarianceData& sampled, double delta) {
  require(exact.size() == sampled.size(), ErrorCode::kDimensionMismatch,
          "exact and sampled covariance have different sizes");
  require(delta >= 0.0, ErrorCode::kInvalidArgument, "delta must be >= 0");

  const Eigen::MatrixXd a_exact = 0.5 * (exact.a + exact.a.transpose());
  const Eigen::MatrixXd a_sampled = 0.5 * (sampled.a + sampled.a.transpose());
  const Eigen::MatrixXd perturbation = a_sampled - a_exact;

  DavisKahanReport report;
  report.delta = delta;
  report.perturbation_spectral = spectral_norm(perturbation);
  report.perturbation_frobenius = perturbation.norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> exact_eig(a_exact);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sampled_eig(a_sampled);
  require(exact_eig.info() == Eigen::Success && sampled_eig.info() == Eigen::Success,
          ErrorCode::kNumeric, "covariance eigendecomposition failed");

  const int m = exact.size();
  int gamma_index = -1;
  for (int i = 0; i < m; ++i) {
    if (exact_eig.eigenvalues()(i) <= delta)
      ++report.exact_kernel_dim;
    else if (gamma_index < 0)
      gamma_index = i;
  }
  for (int i = 0; i < m; ++i)
    if (sampled_eig.eigenvalues()(i) <= delta) ++report.sampled_kernel_dim;

  if (gamma_index < 0) {
    report.applicable = false;
    report.note = "no exact eigenvalue lies above delta; the spectral gap "
                  "gamma - delta does not exist and the bound is inapplicable";
    return report;
  }
  report.gamma = exact_eig.eigenvalues()(gamma_index);

  // Spectral projectors: exact on [gamma, inf), sampled on (-inf, delta].
  Eigen::MatrixXd projector_exact = Eigen::MatrixXd::Zero(m, m);
  for (int i = gamma_index; i < m; ++i)
    projector_exact += exact_eig.eigenvectors().col(i) *
                       exact_eig.eigenvectors().col(i).transpose();
  Eigen::MatrixXd projector_sampled = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < report.sampled_kernel_dim; ++i)
    projector_sampled += sampled_eig.eigenvectors().col(i) *
                         sampled_eig.eigenvectors().col(i).transpose();

  const Eigen::MatrixXd product = projector_exact * projector_sampled;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(product);
  report.measured_overlap = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;

  report.bound = report.perturbation_spectral / (report.gamma - delta);
  report.vacuous = report.bound >= 1.0;
  report.pass = report.measured_overlap <= report.bound + 1e-10;
  if (report.vacuous)
    report.note = "perturbation reaches the spectral gap; the bound exceeds 1 "
                  "and carries no information";
  return report;
}

NoiseStudy run_noise_study(const std::vector<PauliTerm>& pauli_set, const StateVector& psi,
                           long long n_shot, std::uint64_t seed, double delta) {
  NoiseStudy study;
  study.exact = build_covariance(pauli_set, psi);
  study.sampled = sample_covariance(pauli_set, psi, n_shot, seed);
  study.shots = n_shot;
  study.seed = seed;

  const Eigen::MatrixXd perturbation = study.sampled.a - study.exact.a;
  study.perturbation_spectral = spectral_norm(0.5 * (perturbation + perturbation.transpose()));
  study.perturbation_frobenius = perturbation.norm();

  // First-order per-entry variance of the estimator, accumulated over the
  // matrix: replaces the single sigma^2 of the crude m^2 sigma^2 / N estimate
  // with the actual entry variances.
  const int m = study.exact.size();
  const double shots = static_cast<double>(n_shot);
  double predicted = 0.0;
  auto bernoulli_variance = [&](double expectation_value) {
    const double clamped = std::clamp(expectation_value, -1.0, 1.0);
    return (1.0 - clamped * clamped) / shots;
  };
  for (int i = 0; i < m; ++i) {
    predicted += 4.0 * study.exact.b(i) * study.exact.b(i) * bernoulli_variance(study.exact.b(i));
    for (int j = i + 1; j < m; ++j) {
      double entry = study.exact.b(j) * study.exact.b(j) * bernoulli_variance(study.exact.b(i)) +
                     study.exact.b(i) * study.exact.b(i) * bernoulli_variance(study.exact.b(j));
      if (commutes(pauli_set[static_cast<std::size_t>(i)],
                   pauli_set[static_cast<std::size_t>(j)])) {
        const double product_expectation =
            study.exact.a(i, j) + study.exact.b(i) * study.exact.b(j);
        entry += bernoulli_variance(product_expectation);
      }
      predicted += 2.0 * entry;  // both (i, j) and (j, i)
    }
  }
  study.predicted_frobenius_sq = predicted;

  study.davis_kahan = davis_kahan_check(study.exact, study.sampled, delta);
  return study;
}

std::string noise_study_json(const NoiseStudy& study) {
  json labels = json::array();
  for (const auto& term : study.exact.pauli_set) labels.push_back(term.label());
  const DavisKahanReport& dk = study.davis_kahan;
  const json doc{
      {"format", "asparent-noise-study"},
      {"m", study.exact.size()},
      {"pauli_set", labels},
      {"shots", study.shots},
      {"seed", study.seed},
      {"perturbation", {{"spectral", study.perturbation_spectral},
                        {"frobenius", study.perturbation_frobenius},
                        {"frobenius_sq", study.perturbation_frobenius * study.perturbation_frobenius},
                        {"predicted_frobenius_sq", study.predicted_frobenius_sq}}},
      {"davis_kahan",
       {{"applicable", dk.applicable},
        {"delta", dk.delta},
        {"gamma", dk.gamma},
        {"exact_kernel_dim", dk.exact_kernel_dim},
        {"sampled_kernel_dim", dk.sampled_kernel_dim},
        {"measured_overlap", dk.measured_overlap},
        {"bound", dk.bound},
        {"vacuous", dk.vacuous},
        {"pass", dk.pass},
        {"note", dk.note}}},
      {"model",
       "each expectation is the mean of independent +/-1 shots; anticommuting "
       "pairs have exactly zero symmetric part and inherit noise only through b"}};
  return doc.dump(2) + "\n";
}

}  // namespace asparent
