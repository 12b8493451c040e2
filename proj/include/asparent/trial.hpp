#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "asparent/ingest.hpp"
#include "asparent/state.hpp"

namespace asparent {

inline constexpr double kDefaultOverlapThreshold = 1e-8;

/// |bits>: amplitude 1 at the indexed basis element. Leftmost character is
/// qubit 0 (the least significant index bit).
StateVector basis_state(std::string_view bits);

/// Places real amplitudes on computational basis states and normalizes.
/// Duplicate bitstrings are merged (a warning is printed to stderr).
StateVector determinant_superposition(
    const std::vector<std::pair<std::string, double>>& entries);

struct KrylovResult {
  StateVector state = StateVector::computational_zero(1);  // placeholder until filled
  int dimension_used = 0;
  double ritz_energy = 0.0;
  /// Eigenvalues of the overlap matrix of the normalized Krylov vectors,
  /// descending.
  Eigen::VectorXd overlap_spectrum;
};

/// Lowest Ritz pair of H in the Krylov space span{H^p |ref>, p < d}.
/// The Krylov vectors are normalized power iterates; the overlap matrix is
/// canonically orthogonalized, discarding directions with overlap eigenvalue
/// at or below `overlap_threshold`. Requesting d > 2^n saturates.
KrylovResult krylov_ritz(const QubitHamiltonian& hamiltonian,
                         const StateVector& reference, int dimension,
                         double overlap_threshold = kDefaultOverlapThreshold);

/// Builds the state a StateSpec describes. `hamiltonian` is required for
/// Krylov specs and ignored otherwise. Fills `krylov_info` when given.
StateVector build_trial_state(const StateSpec& spec,
                              const QubitHamiltonian* hamiltonian = nullptr,
                              KrylovResult* krylov_info = nullptr);

}  // namespace asparent
