#include "asparent/state.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace asparent {

namespace {

constexpr double kNormTolerance = 1e-10;

void check_same_n(int a, int b, const char* what) {
  require(a == b, ErrorCode::kDimensionMismatch,
          std::string(what) + ": qubit counts differ (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
}

std::complex<double> i_power(int k) {
  static constexpr std::complex<double> kTable[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kTable[((k % 4) + 4) % 4];
}

}  // namespace

StateVector::StateVector(int num_qubits, Eigen::VectorXcd amplitudes)
    : n_(num_qubits), amplitudes_(std::move(amplitudes)) {
  require(num_qubits >= 1 && num_qubits <= kMaxStateQubits, ErrorCode::kInvalidArgument,
          "statevector qubit count must be in [1, " + std::to_string(kMaxStateQubits) + "]");
  require(amplitudes_.size() == (Eigen::Index{1} << num_qubits),
          ErrorCode::kDimensionMismatch,
          "amplitude vector has " + std::to_string(amplitudes_.size()) +
              " entries, expected 2^" + std::to_string(num_qubits));
  const double norm = amplitudes_.norm();
  require(std::abs(norm - 1.0) <= kNormTolerance, ErrorCode::kInvalidArgument,
          "statevector norm " + std::to_string(norm) + " is not 1 within 1e-10");
}

StateVector StateVector::normalized(int num_qubits, Eigen::VectorXcd amplitudes) {
  const double norm = amplitudes.norm();
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::kInvalidArgument,
          "cannot normalize a zero or non-finite amplitude vector");
  amplitudes /= norm;
  return StateVector(num_qubits, std::move(amplitudes));
}

StateVector StateVector::computational_zero(int num_qubits) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  amps(0) = 1.0;
  return StateVector(num_qubits, std::move(amps));
}

Eigen::VectorXcd apply_pauli(const PauliTerm& term, const Eigen::VectorXcd& amplitudes) {
  const std::uint64_t x = term.x_mask();
  const std::uint64_t z = term.z_mask();
  const std::complex<double> base = i_power(std::popcount(x & z));
  Eigen::VectorXcd out(amplitudes.size());
  for (std::uint64_t index = 0; index < static_cast<std::uint64_t>(amplitudes.size());
       ++index) {
    const bool flip = std::popcount(index & z) & 1;
    out(static_cast<Eigen::Index>(index ^ x)) =
        (flip ? -base : base) * amplitudes(static_cast<Eigen::Index>(index));
  }
  return out;
}

StateVector apply_pauli(const PauliTerm& term, const StateVector& state) {
  check_same_n(term.num_qubits(), state.num_qubits(), "apply_pauli");
  return StateVector(state.num_qubits(), apply_pauli(term, state.amplitudes()));
}

Eigen::VectorXcd apply_sum(const PauliSum& sum, const Eigen::VectorXcd& amplitudes) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amplitudes.size());
  for (const auto& [coefficient, term] : sum.terms())
    out += coefficient * apply_pauli(term, amplitudes);
  return out;
}

double expectation(const PauliTerm& term, const StateVector& state) {
  check_same_n(term.num_qubits(), state.num_qubits(), "expectation");
  const Eigen::VectorXcd applied = apply_pauli(term, state.amplitudes());
  return state.amplitudes().dot(applied).real();
}

double expectation(const PauliSum& sum, const StateVector& state) {
  check_same_n(sum.num_qubits(), state.num_qubits(), "expectation");
  double total = 0.0;
  for (const auto& [coefficient, term] : sum.terms())
    total += coefficient * expectation(term, state);
  return total;
}

StateVector apply_exp_pauli(double theta, const PauliTerm& term, const StateVector& state) {
  check_same_n(term.num_qubits(), state.num_qubits(), "apply_exp_pauli");
  const std::complex<double> minus_i_sin(0.0, -std::sin(theta));
  Eigen::VectorXcd out = std::cos(theta) * state.amplitudes() +
                         minus_i_sin * apply_pauli(term, state.amplitudes());
  return StateVector(state.num_qubits(), std::move(out));
}

double fidelity(const StateVector& a, const StateVector& b) {
  check_same_n(a.num_qubits(), b.num_qubits(), "fidelity");
  const double overlap = std::norm(a.amplitudes().dot(b.amplitudes()));
  return std::clamp(overlap, 0.0, 1.0);
}

void fix_global_phase(Eigen::VectorXcd& amplitudes) {
  Eigen::Index argmax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    const double magnitude = std::abs(amplitudes(i));
    if (magnitude > best) {
      best = magnitude;
      argmax = i;
    }
  }
  if (best <= 0.0) return;
  const std::complex<double> rotation = std::abs(amplitudes(argmax)) / amplitudes(argmax);
  amplitudes *= rotation;
}

Spectrum spectrum(const PauliSum& sum, int dense_limit) {
  const Eigen::MatrixXcd dense = to_dense(sum, dense_limit);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  require(solver.info() == Eigen::Success, ErrorCode::kNumeric,
          "eigendecomposition failed to converge");
  Spectrum out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  const Eigen::Index dim = out.eigenvalues.size();
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXcd column = out.eigenvectors.col(j);
    fix_global_phase(column);
    out.eigenvectors.col(j) = column;
  }
  out.degenerate.assign(static_cast<std::size_t>(dim), false);
  for (Eigen::Index j = 0; j + 1 < dim; ++j) {
    if (out.eigenvalues(j + 1) - out.eigenvalues(j) < kDegeneracyTolerance) {
      out.degenerate[static_cast<std::size_t>(j)] = true;
      out.degenerate[static_cast<std::size_t>(j + 1)] = true;
    }
  }
  return out;
}

GroundState ground_state(const PauliSum& sum, int dense_limit) {
  Spectrum full = spectrum(sum, dense_limit);
  GroundState out{full.eigenvalues(0),
                  StateVector(sum.num_qubits(), full.eigenvectors.col(0)),
                  std::move(full)};
  return out;
}

StateVector evolve_exact(const PauliSum& sum, double time, const StateVector& state,
                         int dense_limit) {
  check_same_n(sum.num_qubits(), state.num_qubits(), "evolve_exact");
  const Spectrum eig = spectrum(sum, dense_limit);
  const Eigen::VectorXcd coefficients = eig.eigenvectors.adjoint() * state.amplitudes();
  Eigen::VectorXcd phased(coefficients.size());
  for (Eigen::Index j = 0; j < coefficients.size(); ++j)
    phased(j) = std::exp(std::complex<double>(0.0, -time * eig.eigenvalues(j))) *
                coefficients(j);
  return StateVector(state.num_qubits(), eig.eigenvectors * phased);
}

}  // namespace asparent
