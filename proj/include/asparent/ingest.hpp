#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asparent/pauli.hpp"

namespace asparent {

/// A Hamiltonian with the identity component split off, so `sum` holds only
/// non-identity strings. Metadata is free-form (system label, bond scale,
/// symmetry-sector tag, ...).
struct QubitHamiltonian {
  PauliSum sum;
  double identity_offset = 0.0;
  std::map<std::string, std::string> metadata;

  explicit QubitHamiltonian(int num_qubits) : sum(num_qubits) {}
  QubitHamiltonian(PauliSum s, double offset,
                   std::map<std::string, std::string> meta = {});

  int num_qubits() const { return sum.num_qubits(); }

  /// The non-identity Pauli strings, in canonical order.
  std::vector<PauliTerm> pauli_set() const;
};

/// Moves any identity term of `sum` into the offset.
QubitHamiltonian make_hamiltonian(PauliSum sum, double identity_offset = 0.0,
                                  std::map<std::string, std::string> metadata = {});

enum class HamiltonianFormat { kAuto, kPauliText, kJson };

HamiltonianFormat parse_format(std::string_view name);

QubitHamiltonian load_hamiltonian(const std::filesystem::path& path,
                                  HamiltonianFormat format = HamiltonianFormat::kAuto);
QubitHamiltonian parse_hamiltonian_text(std::string_view text,
                                        const std::string& origin = "<string>");
void save_hamiltonian(const QubitHamiltonian& hamiltonian,
                      const std::filesystem::path& path,
                      HamiltonianFormat format = HamiltonianFormat::kAuto);

/// Named real columns of equal length, written as CSV with a header row and
/// 17-significant-digit values.
struct Series {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

void save_series(const Series& series, const std::filesystem::path& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_full(double value);

/// Diagonal one-body operator from molecular-orbital energies, one qubit per
/// spin orbital, spin-up block first: orbital p occupies qubits p and N+p and
/// contributes eps_p (I - Z)/2 on each.
QubitHamiltonian fock_from_orbital_energies(std::span<const double> energies);

/// How a trial state is specified in files and configs.
struct StateSpec {
  enum class Kind { kBasisState, kDeterminantSuperposition, kKrylov };

  Kind kind = Kind::kBasisState;
  std::string bits;  // basis state, or the Krylov reference
  std::vector<std::pair<std::string, double>> entries;  // determinant superposition
  int krylov_dimension = 1;
  double overlap_threshold = 1e-8;

  static StateSpec basis(std::string bits);
  static StateSpec superposition(std::vector<std::pair<std::string, double>> entries);
  static StateSpec krylov(std::string reference_bits, int dimension);

  static StateSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

StateSpec load_state_spec(const std::filesystem::path& path);

/// Bundled analytic systems for tests and demos.
struct BuiltinSystem {
  std::string name;
  std::string description;
  QubitHamiltonian target{1};
  std::optional<QubitHamiltonian> initial;  // baseline initial Hamiltonian
  std::vector<StateSpec> trials;
  std::vector<double> orbital_energies;  // empty when not applicable
};

/// Registry: "one-qubit-zx", "bell-xx-zz", "ch2-like", "tfim-<n>" (n = 2..10).
BuiltinSystem builtin_system(const std::string& name);
std::vector<std::string> builtin_registry();

}  // namespace asparent
