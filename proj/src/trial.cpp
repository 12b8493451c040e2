#include "asparent/trial.hpp"

#include <algorithm>
#include <iostream>
#include <map>

#include <Eigen/Eigenvalues>

namespace asparent {

namespace {

std::uint64_t bits_to_index(std::string_view bits) {
  require(!bits.empty() && bits.size() <= kMaxStateQubits, ErrorCode::kInvalidArgument,
          "bitstring must have 1.." + std::to_string(kMaxStateQubits) + " characters");
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    require(bits[q] == '0' || bits[q] == '1', ErrorCode::kParse,
            "invalid bitstring character '" + std::string(1, bits[q]) + "' at position " +
                std::to_string(q));
    if (bits[q] == '1') index |= std::uint64_t{1} << q;
  }
  return index;
}

Eigen::VectorXcd apply_hamiltonian(const QubitHamiltonian& hamiltonian,
                                   const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = apply_sum(hamiltonian.sum, v);
  if (hamiltonian.identity_offset != 0.0) out += hamiltonian.identity_offset * v;
  return out;
}

}  // namespace

StateVector basis_state(std::string_view bits) {
  const int n = static_cast<int>(bits.size());
  const std::uint64_t index = bits_to_index(bits);
  Eigen::VectorXcd amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(n, std::move(amplitudes));
}

StateVector determinant_superposition(
    const std::vector<std::pair<std::string, double>>& entries) {
  require(!entries.empty(), ErrorCode::kInvalidArgument,
          "determinant superposition needs at least one entry");
  const std::size_t length = entries.front().first.size();
  std::map<std::uint64_t, double> amplitudes_by_index;
  bool duplicates = false;
  for (const auto& [bits, amplitude] : entries) {
    require(bits.size() == length, ErrorCode::kDimensionMismatch,
            "bitstring '" + bits + "' has length " + std::to_string(bits.size()) +
                ", expected " + std::to_string(length));
    const auto [it, inserted] = amplitudes_by_index.emplace(bits_to_index(bits), amplitude);
    if (!inserted) {
      it->second += amplitude;
      duplicates = true;
    }
  }
  if (duplicates)
    std::cerr << "warning: duplicate bitstrings in determinant superposition were merged\n";

  const int n = static_cast<int>(length);
  Eigen::VectorXcd amplitudes = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  for (const auto& [index, amplitude] : amplitudes_by_index)
    amplitudes(static_cast<Eigen::Index>(index)) = amplitude;
  require(amplitudes.norm() > 0.0, ErrorCode::kInvalidArgument,
          "determinant amplitudes are all zero");
  return StateVector::normalized(n, std::move(amplitudes));
}

KrylovResult krylov_ritz(const QubitHamiltonian& hamiltonian,
                         const StateVector& reference, int dimension,
                         double overlap_threshold) {
  require(dimension >= 1, ErrorCode::kInvalidArgument, "Krylov dimension must be >= 1");
  require(hamiltonian.num_qubits() == reference.num_qubits(),
          ErrorCode::kDimensionMismatch,
          "Hamiltonian and reference act on different qubit counts");
  require(overlap_threshold >= 0.0, ErrorCode::kInvalidArgument,
          "overlap threshold must be non-negative");

  const Eigen::Index dim = reference.dimension();
  const int d_max = static_cast<int>(std::min<Eigen::Index>(dimension, dim));

  // Normalized power iterates K_p ~ H^p |ref>. Normalizing each column keeps
  // the overlap matrix O(1) so the threshold acts on a meaningful scale.
  Eigen::MatrixXcd krylov(dim, d_max);
  Eigen::VectorXcd v = reference.amplitudes();
  int built = 0;
  for (int p = 0; p < d_max; ++p) {
    const double norm = v.norm();
    if (norm < 1e-300) break;  // H^p |ref> vanished (exact breakdown)
    krylov.col(p) = v / norm;
    ++built;
    if (p + 1 < d_max) v = apply_hamiltonian(hamiltonian, krylov.col(p));
  }
  require(built >= 1, ErrorCode::kNumeric, "Krylov reference has zero norm");
  const auto k = krylov.leftCols(built);

  // Canonical orthogonalization of the overlap matrix.
  const Eigen::MatrixXcd overlap = k.adjoint() * k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> overlap_eig(overlap);
  require(overlap_eig.info() == Eigen::Success, ErrorCode::kNumeric,
          "overlap eigendecomposition failed");
  const Eigen::VectorXd mu = overlap_eig.eigenvalues();

  std::vector<int> kept;
  for (int i = 0; i < mu.size(); ++i)
    if (mu(i) > overlap_threshold) kept.push_back(i);
  require(!kept.empty(), ErrorCode::kNumeric,
          "all overlap-matrix directions fall below the threshold");

  Eigen::MatrixXcd basis(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t a = 0; a < kept.size(); ++a)
    basis.col(static_cast<Eigen::Index>(a)) =
        k * overlap_eig.eigenvectors().col(kept[a]) / std::sqrt(mu(kept[a]));

  // Rayleigh-Ritz in the retained orthonormal basis.
  Eigen::MatrixXcd h_in_basis(basis.cols(), basis.cols());
  Eigen::MatrixXcd h_applied(dim, basis.cols());
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    h_applied.col(c) = apply_hamiltonian(hamiltonian, basis.col(c));
  h_in_basis = basis.adjoint() * h_applied;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(h_in_basis);
  require(ritz.info() == Eigen::Success, ErrorCode::kNumeric,
          "Ritz eigendecomposition failed");

  Eigen::VectorXcd state = basis * ritz.eigenvectors().col(0);
  fix_global_phase(state);

  KrylovResult result{StateVector::normalized(reference.num_qubits(), std::move(state)),
                      static_cast<int>(kept.size()), ritz.eigenvalues()(0),
                      mu.reverse()};
  return result;
}

StateVector build_trial_state(const StateSpec& spec, const QubitHamiltonian* hamiltonian,
                              KrylovResult* krylov_info) {
  switch (spec.kind) {
    case StateSpec::Kind::kBasisState:
      return basis_state(spec.bits);
    case StateSpec::Kind::kDeterminantSuperposition:
      return determinant_superposition(spec.entries);
    case StateSpec::Kind::kKrylov: {
      require(hamiltonian != nullptr, ErrorCode::kInvalidArgument,
              "a Hamiltonian is required to build a Krylov trial state");
      KrylovResult result = krylov_ritz(*hamiltonian, basis_state(spec.bits),
                                        spec.krylov_dimension, spec.overlap_threshold);
      StateVector state = result.state;
      if (krylov_info) *krylov_info = std::move(result);
      return state;
    }
  }
  fail(ErrorCode::kInternal, "unhandled state spec kind");
}

}  // namespace asparent
