#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "asparent/pauli.hpp"

namespace asparent {

/// Hard cap on statevector size (2^24 amplitudes = 256 MiB of doubles).
inline constexpr int kMaxStateQubits = 24;

/// Eigenvalue clusters tighter than this are reported as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-9;

/// Dense normalized amplitude vector over the 2^n computational basis.
/// Basis index bit q holds qubit q (qubit 0 = least significant bit,
/// leftmost character of a bitstring label).
class StateVector {
 public:
  StateVector(int num_qubits, Eigen::VectorXcd amplitudes);

  /// Rescales to unit norm instead of rejecting non-normalized input.
  static StateVector normalized(int num_qubits, Eigen::VectorXcd amplitudes);
  static StateVector computational_zero(int num_qubits);

  int num_qubits() const { return n_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

 private:
  int n_;
  Eigen::VectorXcd amplitudes_;
};

/// P|psi>: index permutation from x_mask, sign flips from z_mask, and a
/// global i-power for Y factors.
StateVector apply_pauli(const PauliTerm& term, const StateVector& state);

/// Low-level variant used by inner loops.
Eigen::VectorXcd apply_pauli(const PauliTerm& term, const Eigen::VectorXcd& amplitudes);

/// (sum of c_k P_k)|v>, without identity offset.
Eigen::VectorXcd apply_sum(const PauliSum& sum, const Eigen::VectorXcd& amplitudes);

double expectation(const PauliTerm& term, const StateVector& state);
double expectation(const PauliSum& sum, const StateVector& state);

/// exp(-i theta P)|psi> = cos(theta)|psi> - i sin(theta) P|psi>, exact
/// because P^2 = I.
StateVector apply_exp_pauli(double theta, const PauliTerm& term, const StateVector& state);

/// |<a|b>|^2, clamped into [0, 1].
double fidelity(const StateVector& a, const StateVector& b);

/// Rotates the global phase so the largest-magnitude entry is real positive.
void fix_global_phase(Eigen::VectorXcd& amplitudes);

/// Full eigensystem of a Hermitian Pauli sum. Eigenvalues ascending,
/// eigenvectors orthonormal with the phase convention of fix_global_phase.
/// degenerate[j] marks eigenvalues within kDegeneracyTolerance of a neighbor.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  std::vector<bool> degenerate;
};

Spectrum spectrum(const PauliSum& sum, int dense_limit = kDefaultDenseLimit);

struct GroundState {
  double energy = 0.0;
  StateVector state;
  Spectrum full;
};

GroundState ground_state(const PauliSum& sum, int dense_limit = kDefaultDenseLimit);

/// exp(-i t H)|psi> through the eigendecomposition of H.
StateVector evolve_exact(const PauliSum& sum, double time, const StateVector& state,
                         int dense_limit = kDefaultDenseLimit);

}  // namespace asparent
