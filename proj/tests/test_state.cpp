#include <doctest.h>

#include "asparent/state.hpp"
#include "asparent/trial.hpp"
#include "oracles.hpp"

using namespace asparent;

namespace {

StateVector plus_state() {
  Eigen::VectorXcd amps(2);
  amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return StateVector(1, amps);
}

StateVector bell_state() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps(0) = amps(3) = 1.0 / std::sqrt(2.0);
  return StateVector(2, amps);
}

}  // namespace

TEST_CASE("apply_pauli single-qubit actions") {
  const StateVector zero = basis_state("0");
  CHECK((apply_pauli(PauliTerm::parse("Z"), zero).amplitudes() - zero.amplitudes())
            .norm() == 0.0);

  const StateVector flipped = apply_pauli(PauliTerm::parse("X"), zero);
  CHECK(std::abs(flipped.amplitudes()(1) - 1.0) < 1e-15);

  const StateVector y_applied = apply_pauli(PauliTerm::parse("Y"), zero);
  CHECK(std::abs(y_applied.amplitudes()(1) - std::complex<double>(0, 1)) < 1e-15);
}

TEST_CASE("apply_pauli matches the dense oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const std::string label = oracle::random_label(rng, n, true);
    const oracle::Vec psi = oracle::random_state(rng, n);
    const StateVector state(n, psi);
    const oracle::Vec expected = oracle::dense_from_label(label) * psi;
    const oracle::Vec actual = apply_pauli(PauliTerm::parse(label), state).amplitudes();
    CHECK((expected - actual).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("expectation examples and oracle equivalence") {
  CHECK(expectation(PauliTerm::parse("Z"), basis_state("0")) == doctest::Approx(1.0));
  CHECK(expectation(PauliTerm::parse("Z"), plus_state()) ==
        doctest::Approx(0.0).epsilon(1e-12));

  PauliSum stabilizers(2);
  stabilizers.add(0.5, PauliTerm::parse("XX"));
  stabilizers.add(0.5, PauliTerm::parse("ZZ"));
  CHECK(expectation(stabilizers, bell_state()) == doctest::Approx(1.0));

  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto labels = oracle::random_distinct_labels(rng, n, n == 1 ? 3 : 4);
    PauliSum sum(n);
    std::vector<std::pair<double, std::string>> reference;
    for (const auto& label : labels) {
      const double c = gauss(rng);
      sum.add(c, PauliTerm::parse(label));
      reference.emplace_back(c, label);
    }
    const oracle::Vec psi = oracle::random_state(rng, n);
    const double expected =
        (psi.adjoint() * oracle::dense_from_terms(reference) * psi)(0).real();
    CHECK(expectation(sum, StateVector(n, psi)) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("apply_exp_pauli special angles and norm preservation") {
  const StateVector zero = basis_state("0");
  const PauliTerm x = PauliTerm::parse("X");

  const StateVector unchanged = apply_exp_pauli(0.0, x, zero);
  CHECK((unchanged.amplitudes() - zero.amplitudes()).norm() == 0.0);

  const StateVector quarter = apply_exp_pauli(M_PI / 2.0, x, zero);
  CHECK(std::abs(quarter.amplitudes()(1) - std::complex<double>(0, -1)) < 1e-14);

  const StateVector half = apply_exp_pauli(M_PI, x, zero);
  CHECK(std::abs(half.amplitudes()(0) + 1.0) < 1e-14);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const StateVector psi(n, oracle::random_state(rng, n));
    const PauliTerm term = PauliTerm::parse(oracle::random_label(rng, n));
    CHECK(std::abs(apply_exp_pauli(angle(rng), term, psi).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("ground_state examples and residuals") {
  PauliSum z(1, {{1.0, PauliTerm::parse("Z")}});
  const GroundState g0 = ground_state(z);
  CHECK(g0.energy == doctest::Approx(-1.0));
  CHECK(std::abs(g0.state.amplitudes()(1) - 1.0) < 1e-12);

  PauliSum zizi(2, {{1.0, PauliTerm::parse("ZI")}, {1.0, PauliTerm::parse("IZ")}});
  const GroundState g1 = ground_state(zizi);
  CHECK(g1.energy == doctest::Approx(-2.0));
  CHECK(std::abs(g1.state.amplitudes()(3) - 1.0) < 1e-12);

  PauliSum minus_x(1, {{-1.0, PauliTerm::parse("X")}});
  const GroundState g2 = ground_state(minus_x);
  CHECK(g2.energy == doctest::Approx(-1.0));
  CHECK(fidelity(g2.state, plus_state()) == doctest::Approx(1.0));

  // Residual contract on a random Hermitian sum.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PauliSum random_sum(3);
  for (const auto& label : oracle::random_distinct_labels(rng, 3, 6))
    random_sum.add(gauss(rng), PauliTerm::parse(label));
  const Spectrum full = spectrum(random_sum);
  const Eigen::MatrixXcd dense = to_dense(random_sum);
  const double scale = dense.norm();
  for (Eigen::Index j = 0; j < full.eigenvalues.size(); ++j) {
    const double residual =
        (dense * full.eigenvectors.col(j) - full.eigenvalues(j) * full.eigenvectors.col(j))
            .norm();
    CHECK(residual <= 1e-9 * scale);
  }
}

TEST_CASE("evolve_exact examples, group property, product-formula oracle") {
  PauliSum z(1, {{1.0, PauliTerm::parse("Z")}});
  const StateVector zero = basis_state("0");

  const StateVector still = evolve_exact(z, 0.0, zero);
  CHECK((still.amplitudes() - zero.amplitudes()).norm() < 1e-15);

  const StateVector rotated = evolve_exact(z, M_PI, zero);
  CHECK(std::abs(rotated.amplitudes()(0) + 1.0) < 1e-12);

  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PauliSum h(2);
  for (const auto& label : oracle::random_distinct_labels(rng, 2, 5))
    h.add(gauss(rng), PauliTerm::parse(label));
  const StateVector psi(2, oracle::random_state(rng, 2));

  const StateVector two_step = evolve_exact(h, 0.7, evolve_exact(h, 0.4, psi));
  const StateVector one_step = evolve_exact(h, 1.1, psi);
  CHECK((two_step.amplitudes() - one_step.amplitudes()).norm() < 1e-9);

  // Independent oracle: symmetric (Strang) splitting with many steps.
  const double time = 0.9;
  const int steps = 20000;
  const double dt = time / steps;
  StateVector split = psi;
  for (int k = 0; k < steps; ++k) {
    for (auto it = h.terms().begin(); it != h.terms().end(); ++it)
      split = apply_exp_pauli(0.5 * dt * it->first, it->second, split);
    for (auto it = h.terms().rbegin(); it != h.terms().rend(); ++it)
      split = apply_exp_pauli(0.5 * dt * it->first, it->second, split);
  }
  const StateVector exact = evolve_exact(h, time, psi);
  CHECK((split.amplitudes() - exact.amplitudes()).norm() < 1e-6);
}

TEST_CASE("fidelity examples") {
  const StateVector zero = basis_state("0");
  const StateVector one = basis_state("1");
  CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
  CHECK(fidelity(zero, one) == doctest::Approx(0.0));
  CHECK(fidelity(zero, plus_state()) == doctest::Approx(0.5));
}

TEST_CASE("StateVector validates norm and dimensions") {
  Eigen::VectorXcd bad(2);
  bad << 2.0, 0.0;
  CHECK_THROWS_AS(StateVector(1, bad), Error);
  CHECK_NOTHROW(StateVector::normalized(1, bad));
  Eigen::VectorXcd wrong_size(3);
  wrong_size << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(StateVector(1, wrong_size), Error);
}
