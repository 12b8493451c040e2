#include <doctest.h>

#include <unistd.h>

#include <filesystem>

#include "asparent/parent.hpp"
#include "asparent/trial.hpp"
#include "oracles.hpp"

using namespace asparent;

namespace {

StateVector bell_state() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps(0) = amps(3) = 1.0 / std::sqrt(2.0);
  return StateVector(2, amps);
}

std::vector<PauliTerm> parse_set(const std::vector<std::string>& labels) {
  std::vector<PauliTerm> out;
  for (const auto& label : labels) out.push_back(PauliTerm::parse(label));
  return out;
}

// Synthetic covariance data with a prescribed matrix (for kernel tests the
// Pauli set only fixes m and n).
CovarianceData synthetic_cov(const std::vector<std::string>& labels,
                             const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  CovarianceData cov;
  cov.pauli_set = parse_set(labels);
  cov.a = a;
  cov.b = b;
  return cov;
}

// Random Hamiltonian whose exact ground state supplies a zero-variance trial:
// the coefficient vector is then guaranteed to lie in the covariance kernel.
struct EigenstateFixture {
  std::vector<std::string> labels;
  Eigen::VectorXd beta;
  QubitHamiltonian target{1};
  StateVector psi = StateVector::computational_zero(1);
};

EigenstateFixture eigenstate_fixture(std::mt19937_64& rng, int n, int terms) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  EigenstateFixture fixture;
  fixture.labels = oracle::random_distinct_labels(rng, n, terms);
  PauliSum sum(n);
  fixture.beta.resize(terms);
  for (int k = 0; k < terms; ++k) {
    fixture.beta(k) = gauss(rng);
    sum.add(fixture.beta(k), PauliTerm::parse(fixture.labels[static_cast<std::size_t>(k)]));
  }
  fixture.target = QubitHamiltonian(std::move(sum), 0.0);
  fixture.psi = ground_state(fixture.target.sum).state;
  // The sum's canonical order may differ from label order; rebuild beta
  // against the canonical Pauli set.
  fixture.labels.clear();
  Eigen::VectorXd beta(fixture.target.sum.size());
  int k = 0;
  for (const auto& [coefficient, term] : fixture.target.sum.terms()) {
    fixture.labels.push_back(term.label());
    beta(k++) = coefficient;
  }
  fixture.beta = beta;
  return fixture;
}

}  // namespace

TEST_CASE("build_covariance: hand-derived fixtures") {
  const CovarianceData zx = build_covariance(parse_set({"Z", "X"}), basis_state("0"));
  CHECK(zx.b(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zx.b(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(zx.a(0, 0)) < 1e-12);
  CHECK(std::abs(zx.a(0, 1)) < 1e-12);
  CHECK(std::abs(zx.a(1, 0)) < 1e-12);
  CHECK(zx.a(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(zx.shots == 0);

  const CovarianceData bell =
      build_covariance(parse_set({"XX", "ZZ", "YY"}), bell_state());
  CHECK(bell.b(0) == doctest::Approx(1.0));
  CHECK(bell.b(1) == doctest::Approx(1.0));
  CHECK(bell.b(2) == doctest::Approx(-1.0));
  CHECK(bell.a.cwiseAbs().maxCoeff() < 1e-12);

  const CovarianceData eigen_case = build_covariance(parse_set({"Z"}), basis_state("0"));
  CHECK(std::abs(eigen_case.a(0, 0)) < 1e-14);
}

TEST_CASE("build_covariance rejects identity terms and mismatched dimensions") {
  CHECK_THROWS_AS(build_covariance(parse_set({"II"}), bell_state()), Error);
  CHECK_THROWS_AS(build_covariance(parse_set({"X"}), bell_state()), Error);
}

TEST_CASE("covariance quadratic form equals the variance (PSD witness)") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const auto labels = oracle::random_distinct_labels(rng, n, 5);
    const oracle::Vec psi = oracle::random_state(rng, n);
    const CovarianceData cov = build_covariance(parse_set(labels), StateVector(n, psi));

    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = gauss(rng);

    // Independent variance: <M^2> - <M>^2 with M from the Kronecker oracle.
    std::vector<std::pair<double, std::string>> terms;
    for (int i = 0; i < 5; ++i) terms.emplace_back(v(i), labels[static_cast<std::size_t>(i)]);
    const oracle::Mat m = oracle::dense_from_terms(terms);
    const double mean = (psi.adjoint() * m * psi)(0).real();
    const double second = (psi.adjoint() * (m * m) * psi)(0).real();
    const double variance = second - mean * mean;

    CHECK(v.dot(cov.a * v) == doctest::Approx(variance).epsilon(1e-9));
    CHECK(v.dot(cov.a * v) >= -1e-9);
  }
}

TEST_CASE("kernel_basis: threshold semantics") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  const KernelBasis one = kernel_basis(synthetic_cov({"ZI", "IZ"}, a, Eigen::Vector2d(0, 0)),
                                       1e-8);
  CHECK(one.dim() == 1);
  CHECK(std::abs(one.e(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(one.e(0, 0)) < 1e-12);
  CHECK(one.gap_above == doctest::Approx(1.0));

  const KernelBasis full = kernel_basis(
      synthetic_cov({"XI", "IY", "ZZ"}, Eigen::MatrixXd::Zero(3, 3), Eigen::Vector3d(0, 0, 0)),
      1e-8);
  CHECK(full.dim() == 3);
  CHECK((full.e.transpose() * full.e - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  CHECK(std::isinf(full.gap_above));

  Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(3, 3);
  mixed(1, 1) = 1e-10;
  mixed(2, 2) = 1.0;
  const KernelBasis two = kernel_basis(
      synthetic_cov({"XI", "IY", "ZZ"}, mixed, Eigen::Vector3d(0, 0, 0)), 1e-8);
  CHECK(two.dim() == 2);
  CHECK(two.gap_above == doctest::Approx(1.0));
}

TEST_CASE("kernel_basis: empty kernel reports the smallest eigenvalue and options") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 0.25;
  a(1, 1) = 2.0;
  try {
    kernel_basis(synthetic_cov({"ZI", "IZ"}, a, Eigen::Vector2d(0, 0)), 1e-8);
    FAIL("expected empty-kernel error");
  } catch (const Error& error) {
    CHECK(error.code() == ErrorCode::kEmptyKernel);
    const std::string message = error.what();
    CHECK(message.find("0.25") != std::string::npos);
    CHECK(message.find("unsuccessful") != std::string::npos);
    CHECK(message.find("extend") != std::string::npos);
  }
}

TEST_CASE("fold: single-term fixture gives 2I - 2Z") {
  const CovarianceData cov = build_covariance(parse_set({"Z"}), basis_state("0"));
  const ParentHamiltonian parent = fold(Eigen::VectorXd::Ones(1), cov);
  CHECK(parent.lambda == doctest::Approx(1.0));
  CHECK(parent.folded.identity_offset == doctest::Approx(2.0));
  CHECK(parent.folded.sum.coefficient(PauliTerm::parse("Z")) == doctest::Approx(-2.0));

  const GroundState ground = ground_state(parent.folded.sum);
  CHECK(ground.energy + parent.folded.identity_offset == doctest::Approx(0.0));
  CHECK(ground.full.eigenvalues(1) + parent.folded.identity_offset == doctest::Approx(4.0));

  // Annihilates |0>.
  const Eigen::VectorXcd applied =
      apply_sum(parent.folded.sum, basis_state("0").amplitudes()) +
      parent.folded.identity_offset * basis_state("0").amplitudes();
  CHECK(applied.norm() < 1e-12);
}

TEST_CASE("fold: homogeneity in the overall scale") {
  std::mt19937_64 rng(7);
  EigenstateFixture fixture = eigenstate_fixture(rng, 3, 6);
  const CovarianceData cov =
      build_covariance(parse_set(fixture.labels), fixture.psi);
  const ParentHamiltonian base = fold(fixture.beta, cov);
  const ParentHamiltonian scaled = fold(2.5 * fixture.beta, cov);
  CHECK(scaled.folded.identity_offset ==
        doctest::Approx(6.25 * base.folded.identity_offset).epsilon(1e-10));
  REQUIRE(scaled.folded.sum.size() == base.folded.sum.size());
  for (std::size_t k = 0; k < base.folded.sum.size(); ++k) {
    CHECK(scaled.folded.sum.terms()[k].second == base.folded.sum.terms()[k].second);
    CHECK(scaled.folded.sum.terms()[k].first ==
          doctest::Approx(6.25 * base.folded.sum.terms()[k].first).epsilon(1e-10));
  }
}

TEST_CASE("fold equals the squared shifted proto-parent (dense oracle)") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);  // up to 4 qubits
    EigenstateFixture fixture = eigenstate_fixture(rng, n, 4 + static_cast<int>(rng() % 5));
    const CovarianceData cov = build_covariance(parse_set(fixture.labels), fixture.psi);
    const KernelBasis kernel = kernel_basis(cov, 1e-8);

    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(kernel.dim());
    for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
    Eigen::VectorXd alpha = kernel.e * x;
    alpha /= alpha.norm();

    const ParentHamiltonian parent = fold(alpha, cov);
    const Eigen::Index dim = Eigen::Index{1} << n;

    // Oracle side: dense proto and lambda built directly from labels.
    std::vector<std::pair<double, std::string>> proto_terms;
    for (int i = 0; i < alpha.size(); ++i)
      proto_terms.emplace_back(alpha(i), fixture.labels[static_cast<std::size_t>(i)]);
    const oracle::Mat proto = oracle::dense_from_terms(proto_terms);
    const oracle::Vec psi = fixture.psi.amplitudes();
    const double lambda = (psi.adjoint() * proto * psi)(0).real();
    const oracle::Mat shifted = proto - lambda * oracle::Mat::Identity(dim, dim);
    const oracle::Mat expected = shifted * shifted;

    const oracle::Mat actual = to_dense(parent.folded.sum) +
                               parent.folded.identity_offset *
                                   oracle::Mat::Identity(dim, dim);
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(parent.lambda == doctest::Approx(lambda).epsilon(1e-10));

    // PSD and annihilation of the trial state.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(actual);
    CHECK(eig.eigenvalues()(0) >= -1e-9);
    CHECK((actual * psi).norm() <= 1e-8);
  }
}

TEST_CASE("fold: anticommuting pairs leave no product term behind") {
  // S = {X, Z} anticommute; their product would be a Y term.
  const CovarianceData cov = build_covariance(parse_set({"X", "Z"}), basis_state("0"));
  const ParentHamiltonian parent = fold(Eigen::Vector2d(0.7, -0.3), cov);
  CHECK(parent.folded.sum.coefficient(PauliTerm::parse("Y")) == 0.0);
}

TEST_CASE("exact_cost: self-distance, 1-qubit arithmetic, continuity") {
  const CovarianceData cov = build_covariance(parse_set({"Z"}), basis_state("0"));
  const Eigen::VectorXd alpha = Eigen::VectorXd::Ones(1);
  const ParentHamiltonian parent = fold(alpha, cov);
  CHECK(exact_cost(alpha, cov, parent.folded) == doctest::Approx(0.0).epsilon(1e-12));

  // target = -X: || 2I - 2Z + X ||_F^2 via 2x2 arithmetic = 18.
  PauliSum minus_x(1, {{-1.0, PauliTerm::parse("X")}});
  const QubitHamiltonian target(std::move(minus_x), 0.0);
  oracle::Mat reference(2, 2);
  reference << 0, 1, 1, 4;
  CHECK(exact_cost(alpha, cov, target) ==
        doctest::Approx(reference.squaredNorm()).epsilon(1e-12));
  CHECK(reference.squaredNorm() == doctest::Approx(18.0));

  const double base = exact_cost(alpha, cov, target);
  const double nudged = exact_cost(alpha + Eigen::VectorXd::Constant(1, 1e-7), cov, target);
  CHECK(std::abs(nudged - base) < 1e-3);
}

TEST_CASE("reduce: projections and the commuting-pair penalty matrix") {
  // ell = 1 fixture: A = diag(0, 1), b = (1, 0), beta = (-2, 0).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(1, 1) = 1.0;
  const CovarianceData cov = synthetic_cov({"Z", "X"}, a, Eigen::Vector2d(1.0, 0.0));
  const KernelBasis kernel = kernel_basis(cov, 1e-8);
  REQUIRE(kernel.dim() == 1);

  PauliSum target_sum(1, {{-2.0, PauliTerm::parse("Z")}});
  const QubitHamiltonian target(std::move(target_sum), 0.0);
  const ReducedProblem problem = reduce(kernel, cov, target, 0.0);
  CHECK(problem.b_tilde(0) == doctest::Approx(1.0));
  CHECK(problem.beta_tilde(0) == doctest::Approx(-2.0));
  CHECK(problem.beta_norm_sq == doctest::Approx(4.0));
  // {Z, X} anticommute: the penalty matrix vanishes.
  CHECK(problem.delta_tilde.cwiseAbs().maxCoeff() < 1e-14);

  // {ZI, IZ} commute: with E = I the penalty matrix is the off-diagonal pair.
  const CovarianceData commuting =
      synthetic_cov({"ZI", "IZ"}, Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(0, 0));
  const KernelBasis full_kernel = kernel_basis(commuting, 1e-8);
  PauliSum two_z(2, {{1.0, PauliTerm::parse("ZI")}, {1.0, PauliTerm::parse("IZ")}});
  const ReducedProblem commuting_problem =
      reduce(full_kernel, commuting, QubitHamiltonian(std::move(two_z), 0.0), 1.0);
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK((commuting_problem.delta_tilde - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reduce rejects target terms outside S") {
  const CovarianceData cov =
      synthetic_cov({"Z"}, Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1));
  const KernelBasis kernel = kernel_basis(cov, 1e-8);
  PauliSum target_sum(1, {{1.0, PauliTerm::parse("X")}});
  CHECK_THROWS_AS(reduce(kernel, cov, QubitHamiltonian(std::move(target_sum), 0.0), 1.0),
                  Error);
}

TEST_CASE("reduced_cost: examples and the direct-expansion oracle") {
  ReducedProblem problem;
  problem.b_tilde = Eigen::VectorXd::Ones(1);
  problem.beta_tilde = Eigen::VectorXd::Constant(1, -2.0);
  problem.delta_tilde = Eigen::MatrixXd::Zero(1, 1);
  problem.beta_norm_sq = 4.0;
  problem.rho = 0.0;

  CHECK(reduced_cost(Eigen::VectorXd::Zero(1), problem) == doctest::Approx(0.0));
  CHECK(reduced_cost(Eigen::VectorXd::Ones(1), problem) == doctest::Approx(-4.0));

  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 4 + static_cast<int>(rng() % 3);
    const auto labels = oracle::random_distinct_labels(rng, 3, m);
    const oracle::Vec psi = oracle::random_state(rng, 3);
    const CovarianceData cov = build_covariance(parse_set(labels), StateVector(3, psi));
    KernelBasis kernel;  // use the full eigenbasis so E is m x m orthonormal
    kernel.e = Eigen::MatrixXd::Identity(m, m);
    kernel.delta = 0.0;
    kernel.eigenvalues = Eigen::VectorXd::Zero(m);
    kernel.gap_above = 0.0;

    PauliSum target_sum(3);
    Eigen::VectorXd beta(m);
    for (int i = 0; i < m; ++i) {
      beta(i) = gauss(rng);
      target_sum.add(beta(i), PauliTerm::parse(labels[static_cast<std::size_t>(i)]));
    }
    // Canonical reordering: rebuild beta against cov.pauli_set.
    for (int i = 0; i < m; ++i)
      beta(i) = target_sum.coefficient(cov.pauli_set[static_cast<std::size_t>(i)]);

    const double rho = std::abs(gauss(rng));
    const ReducedProblem reduced =
        reduce(kernel, cov, QubitHamiltonian(target_sum, 0.0), rho);

    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = gauss(rng);
    const Eigen::VectorXd alpha = kernel.e * x;

    // Direct expansion: ||2 (b.alpha) alpha + beta||^2 - ||beta||^2
    //                   + rho alpha^T dbar alpha.
    const double b_dot_alpha = cov.b.dot(alpha);
    double penalty = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && commutes(cov.pauli_set[static_cast<std::size_t>(i)],
                               cov.pauli_set[static_cast<std::size_t>(j)]))
          penalty += alpha(i) * alpha(j);
    const double expected = (2.0 * b_dot_alpha * alpha + beta).squaredNorm() -
                            beta.squaredNorm() + rho * penalty;
    CHECK(reduced_cost(x, reduced) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("reduced_cost_gradient matches central finite differences") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 4);
    ReducedProblem problem;
    problem.b_tilde.resize(dim);
    problem.beta_tilde.resize(dim);
    Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      problem.b_tilde(i) = gauss(rng);
      problem.beta_tilde(i) = gauss(rng);
      for (int j = 0; j < dim; ++j) penalty(i, j) = gauss(rng);
    }
    problem.delta_tilde = 0.5 * (penalty + penalty.transpose());
    problem.rho = std::abs(gauss(rng));

    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
    const Eigen::VectorXd analytic = reduced_cost_gradient(x, problem);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd step = Eigen::VectorXd::Zero(dim);
      step(i) = 1e-6;
      const double numeric =
          (reduced_cost(x + step, problem) - reduced_cost(x - step, problem)) / 2e-6;
      CHECK(analytic(i) ==
            doctest::Approx(numeric).epsilon(1e-5).scale(std::abs(numeric) + 1.0));
    }
  }
}

TEST_CASE("init_alpha: closed form, constraint, and fallback") {
  ReducedProblem problem;
  problem.b_tilde = Eigen::VectorXd::Ones(1);
  problem.beta_tilde = Eigen::VectorXd::Constant(1, -2.0);
  problem.delta_tilde = Eigen::MatrixXd::Zero(1, 1);
  problem.rho = 0.0;

  const double one[] = {1.0};
  const InitialPoint unit = init_alpha(problem, one);
  CHECK(unit.x0(0) == doctest::Approx(1.0));
  CHECK(unit.cost == doctest::Approx(-4.0));
  CHECK_FALSE(unit.fallback);

  // beta_tilde = 0: x(c) = c b / ||b||^2.
  ReducedProblem no_beta;
  no_beta.b_tilde = Eigen::Vector2d(1.0, 2.0);
  no_beta.beta_tilde = Eigen::Vector2d(0.0, 0.0);
  no_beta.delta_tilde = Eigen::MatrixXd::Zero(2, 2);
  no_beta.rho = 0.0;
  const double c_fixed[] = {0.7};
  const InitialPoint scaled = init_alpha(no_beta, c_fixed);
  CHECK((scaled.x0 - 0.7 * no_beta.b_tilde / 5.0).norm() < 1e-12);

  // Constraint b.x(c) = c for every grid value.
  std::mt19937_64 rng(15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ReducedProblem random_problem;
  random_problem.b_tilde = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  random_problem.beta_tilde = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  random_problem.delta_tilde = Eigen::MatrixXd::Zero(3, 3);
  random_problem.rho = 0.0;
  for (const double c : {-3.0, -0.2, 0.4, 1.7, 25.0}) {
    const double grid[] = {c};
    const InitialPoint point = init_alpha(random_problem, grid);
    CHECK(random_problem.b_tilde.dot(point.x0) == doctest::Approx(c).epsilon(1e-10));
  }

  // b_tilde = 0 falls back to the normalized -beta direction, flagged.
  ReducedProblem degenerate;
  degenerate.b_tilde = Eigen::Vector2d(0.0, 0.0);
  degenerate.beta_tilde = Eigen::Vector2d(3.0, -4.0);
  degenerate.delta_tilde = Eigen::MatrixXd::Zero(2, 2);
  degenerate.rho = 0.0;
  const InitialPoint fallback = init_alpha(degenerate);
  CHECK(fallback.fallback);
  CHECK(fallback.x0.norm() == doctest::Approx(1.0));
  CHECK((fallback.x0 + degenerate.beta_tilde.normalized()).norm() < 1e-12);
}

TEST_CASE("optimize_alpha: scalar problems match a brute-force grid scan") {
  // Bell fixture restricted to S = {XX, ZZ}: the kernel is the whole plane.
  const CovarianceData cov = build_covariance(parse_set({"XX", "ZZ"}), bell_state());
  const KernelBasis kernel = kernel_basis(cov, 1e-8);
  REQUIRE(kernel.dim() == 2);
  PauliSum target_sum(2,
                      {{-1.0, PauliTerm::parse("XX")}, {-1.0, PauliTerm::parse("ZZ")}});
  const QubitHamiltonian target(std::move(target_sum), 0.0);
  const ReducedProblem problem = reduce(kernel, cov, target, 1.0);

  const InitialPoint start = init_alpha(problem);
  OptimizerReport report;
  const ParentHamiltonian parent =
      optimize_alpha(problem, kernel, cov, start.x0, {}, &report);
  CHECK(parent.cost_value <= start.cost + 1e-12);

  // Dense scan over the symmetric direction (the optimum is symmetric by the
  // problem's symmetry): C(t) = 32 t^4 - 14 t^2, minimum at t = sqrt(7/32).
  double best = std::numeric_limits<double>::infinity();
  for (double t = -1.5; t <= 1.5; t += 1e-5) {
    const double value = 32.0 * t * t * t * t - 14.0 * t * t;
    best = std::min(best, value);
  }
  CHECK(parent.cost_value == doctest::Approx(best).epsilon(1e-6));

  // The folded parent annihilates the Bell state.
  const Eigen::VectorXcd applied =
      apply_sum(parent.folded.sum, bell_state().amplitudes()) +
      parent.folded.identity_offset * bell_state().amplitudes();
  CHECK(applied.norm() < 1e-10);
}

TEST_CASE("optimize_alpha: a stationary start is returned unchanged") {
  const CovarianceData cov = build_covariance(parse_set({"XX", "ZZ"}), bell_state());
  const KernelBasis kernel = kernel_basis(cov, 1e-8);
  PauliSum target_sum(2,
                      {{-1.0, PauliTerm::parse("XX")}, {-1.0, PauliTerm::parse("ZZ")}});
  const ReducedProblem problem =
      reduce(kernel, cov, QubitHamiltonian(std::move(target_sum), 0.0), 1.0);

  // Stationary point along the symmetric direction: t = sqrt(7/32) per
  // component in alpha coordinates; map through E^T (E is orthogonal here).
  const double t = std::sqrt(7.0 / 32.0);
  const Eigen::VectorXd alpha_star = Eigen::Vector2d(t, t);
  const Eigen::VectorXd x_star = kernel.e.transpose() * alpha_star;
  REQUIRE(reduced_cost_gradient(x_star, problem).norm() < 1e-9);

  OptimizerReport report;
  const ParentHamiltonian parent =
      optimize_alpha(problem, kernel, cov, x_star, {}, &report);
  CHECK(report.iterations == 0);
  CHECK((parent.alpha - alpha_star).norm() < 1e-12);
}

TEST_CASE("optimize_alpha: exact-eigenstate trials yield annihilating parents") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    EigenstateFixture fixture = eigenstate_fixture(rng, n, 5 + static_cast<int>(rng() % 3));
    const CovarianceData cov = build_covariance(parse_set(fixture.labels), fixture.psi);

    // beta lies in the kernel: the trial is an eigenstate of the target.
    CHECK(fixture.beta.dot(cov.a * fixture.beta) <=
          1e-8 * fixture.beta.squaredNorm() + 1e-12);

    const KernelBasis kernel = kernel_basis(cov, 1e-8);
    const ReducedProblem problem = reduce(kernel, cov, fixture.target, 1.0);
    const InitialPoint start = init_alpha(problem);
    const ParentHamiltonian parent = optimize_alpha(problem, kernel, cov, start.x0);

    const Eigen::VectorXcd applied =
        apply_sum(parent.folded.sum, fixture.psi.amplitudes()) +
        parent.folded.identity_offset * fixture.psi.amplitudes();
    CHECK(applied.norm() <= 1e-8 * std::max(1.0, parent.alpha.squaredNorm()));
    CHECK(parent.alpha.norm() < 1e6);  // the optimizer stayed bounded
  }
}

TEST_CASE("eigenstate detection: beta in the kernel iff psi is an eigenstate") {
  std::mt19937_64 rng(555);
  EigenstateFixture fixture = eigenstate_fixture(rng, 3, 6);
  const CovarianceData eigen_cov =
      build_covariance(parse_set(fixture.labels), fixture.psi);
  const double eigen_variance =
      fixture.beta.dot(eigen_cov.a * fixture.beta) / fixture.beta.squaredNorm();
  CHECK(eigen_variance <= 1e-9);

  // A generic state is not an eigenstate of the same operator.
  const StateVector generic(3, oracle::random_state(rng, 3));
  const CovarianceData generic_cov =
      build_covariance(parse_set(fixture.labels), generic);
  const double generic_variance =
      fixture.beta.dot(generic_cov.a * fixture.beta) / fixture.beta.squaredNorm();
  CHECK(generic_variance > 1e-4);
}

TEST_CASE("covariance and parent artifacts round-trip through files") {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("asparent_parent_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  const CovarianceData cov = build_covariance(parse_set({"XX", "ZZ"}), bell_state());
  save_covariance(cov, dir / "cov.json");
  const CovarianceData loaded = load_covariance(dir / "cov.json");
  CHECK(loaded.size() == cov.size());
  CHECK((loaded.a - cov.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.b - cov.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.pauli_set[0] == cov.pauli_set[0]);

  const KernelBasis kernel = kernel_basis(cov, 1e-8);
  PauliSum target_sum(2,
                      {{-1.0, PauliTerm::parse("XX")}, {-1.0, PauliTerm::parse("ZZ")}});
  const ReducedProblem problem =
      reduce(kernel, cov, QubitHamiltonian(std::move(target_sum), 0.0), 1.0);
  OptimizerReport report;
  const ParentHamiltonian parent =
      optimize_alpha(problem, kernel, cov, init_alpha(problem).x0, {}, &report);
  const ParentArtifacts artifacts =
      save_parent(parent, kernel, report, 1.0, dir / "parent_demo");
  const QubitHamiltonian reloaded = load_hamiltonian(artifacts.hamiltonian_path);
  CHECK(reloaded.num_qubits() == 2);
  CHECK(reloaded.identity_offset == doctest::Approx(parent.folded.identity_offset));
}
