#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "asparent/errors.hpp"

namespace asparent {

/// Masks are stored in a single 64-bit word per kind.
inline constexpr int kMaxQubits = 64;

/// Qubit counts above this refuse dense-matrix export (2^n x 2^n storage).
inline constexpr int kDefaultDenseLimit = 12;

/// Coefficients with smaller magnitude are dropped when sums are simplified.
inline constexpr double kDefaultPruneTolerance = 1e-12;

/// An n-qubit Pauli string in symplectic encoding: bit q of x_mask/z_mask set
/// iff the factor on qubit q contains X/Z (both set means Y). The textual
/// label convention puts qubit 0 leftmost, and qubit q is bit q of both masks
/// and of the basis-state index.
class PauliTerm {
 public:
  PauliTerm() = default;
  PauliTerm(int num_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  /// Parses a label such as "XIZY". Throws kParse naming the bad position.
  static PauliTerm parse(std::string_view label);
  static PauliTerm identity(int num_qubits);

  int num_qubits() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  bool is_identity() const { return x_ == 0 && z_ == 0; }

  /// Number of non-identity single-qubit factors.
  int weight() const;

  std::string label() const;

  friend bool operator==(const PauliTerm& a, const PauliTerm& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }
  friend bool operator!=(const PauliTerm& a, const PauliTerm& b) { return !(a == b); }

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Canonical ordering: lexicographic on (z_mask, x_mask).
struct PauliTermLess {
  bool operator()(const PauliTerm& a, const PauliTerm& b) const {
    if (a.z_mask() != b.z_mask()) return a.z_mask() < b.z_mask();
    return a.x_mask() < b.x_mask();
  }
};

/// Product of two Pauli strings. The phase is i^phase_power with
/// phase_power in {0,1,2,3}.
struct PhasedTerm {
  int phase_power = 0;
  PauliTerm term;

  std::complex<double> phase() const {
    static constexpr std::complex<double> kTable[4] = {
        {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kTable[phase_power & 3];
  }
};

PhasedTerm pauli_product(const PauliTerm& a, const PauliTerm& b);

/// True iff [a, b] = 0, i.e. the symplectic form
/// |x_a & z_b| + |z_a & x_b| is even.
bool commutes(const PauliTerm& a, const PauliTerm& b);

/// A real-weighted (hence Hermitian) combination of Pauli strings. Terms are
/// kept merged, pruned against the tolerance, and canonically ordered at all
/// times, so iteration order is deterministic.
class PauliSum {
 public:
  using Term = std::pair<double, PauliTerm>;

  explicit PauliSum(int num_qubits, double prune_tolerance = kDefaultPruneTolerance);
  PauliSum(int num_qubits, std::vector<Term> terms,
           double prune_tolerance = kDefaultPruneTolerance);

  int num_qubits() const { return n_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  double prune_tolerance() const { return prune_tolerance_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Merge-inserts at the canonical position; drops the entry if the merged
  /// coefficient falls below the prune tolerance.
  void add(double coefficient, const PauliTerm& term);

  /// Coefficient of `term`, or 0 when absent.
  double coefficient(const PauliTerm& term) const;

  /// Re-prunes against `tolerance` (merging and ordering are maintained
  /// incrementally, so this is idempotent).
  PauliSum simplified(double tolerance) const;
  PauliSum simplified() const { return simplified(prune_tolerance_); }

  void scale(double factor);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);

 private:
  int n_ = 0;
  double prune_tolerance_ = kDefaultPruneTolerance;
  std::vector<Term> terms_;
};

PauliSum operator*(double factor, PauliSum sum);
PauliSum operator+(PauliSum lhs, const PauliSum& rhs);
PauliSum operator-(PauliSum lhs, const PauliSum& rhs);

/// ca*a + cb*b with merged terms.
PauliSum linear_combination(double ca, const PauliSum& a, double cb, const PauliSum& b);

/// Dense 2^n x 2^n matrix of a single Pauli string.
Eigen::MatrixXcd to_dense(const PauliTerm& term, int dense_limit = kDefaultDenseLimit);

/// Dense matrix of a sum (no identity offset; callers add that separately).
Eigen::MatrixXcd to_dense(const PauliSum& sum, int dense_limit = kDefaultDenseLimit);

}  // namespace asparent
