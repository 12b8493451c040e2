#include "asparent/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace asparent {

namespace {

int popcount(std::uint64_t value) { return std::popcount(value); }

void check_same_n(const PauliTerm& a, const PauliTerm& b) {
  require(a.num_qubits() == b.num_qubits(), ErrorCode::kDimensionMismatch,
          "Pauli terms act on different qubit counts (" +
              std::to_string(a.num_qubits()) + " vs " + std::to_string(b.num_qubits()) + ")");
}

void check_dense_limit(int n, int dense_limit) {
  require(n <= dense_limit, ErrorCode::kDenseLimit,
          "dense export requested for n = " + std::to_string(n) +
              " qubits, above the dense limit " + std::to_string(dense_limit));
}

}  // namespace

PauliTerm::PauliTerm(int num_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n_(num_qubits), x_(x_mask), z_(z_mask) {
  require(num_qubits >= 1 && num_qubits <= kMaxQubits, ErrorCode::kInvalidArgument,
          "qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
              std::to_string(num_qubits));
  const std::uint64_t valid =
      num_qubits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << num_qubits) - 1);
  require((x_ & ~valid) == 0 && (z_ & ~valid) == 0, ErrorCode::kInvalidArgument,
          "mask has bits outside the " + std::to_string(num_qubits) + "-qubit range");
}

PauliTerm PauliTerm::parse(std::string_view label) {
  require(!label.empty() && label.size() <= kMaxQubits, ErrorCode::kParse,
          "Pauli label must have 1.." + std::to_string(kMaxQubits) + " characters");
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (std::size_t q = 0; q < label.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (label[q]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      case 'Z': z |= bit; break;
      default:
        fail(ErrorCode::kParse, "invalid Pauli character '" + std::string(1, label[q]) +
                                    "' at position " + std::to_string(q) +
                                    " (expected one of I, X, Y, Z)");
    }
  }
  return PauliTerm(static_cast<int>(label.size()), x, z);
}

PauliTerm PauliTerm::identity(int num_qubits) { return PauliTerm(num_qubits, 0, 0); }

int PauliTerm::weight() const { return popcount(x_ | z_); }

std::string PauliTerm::label() const {
  std::string out(static_cast<std::size_t>(n_), 'I');
  for (int q = 0; q < n_; ++q) {
    const bool x = (x_ >> q) & 1;
    const bool z = (z_ >> q) & 1;
    if (x && z)
      out[static_cast<std::size_t>(q)] = 'Y';
    else if (x)
      out[static_cast<std::size_t>(q)] = 'X';
    else if (z)
      out[static_cast<std::size_t>(q)] = 'Z';
  }
  return out;
}

PhasedTerm pauli_product(const PauliTerm& a, const PauliTerm& b) {
  check_same_n(a, b);
  // Each factor is i^{|x&z|} X^x Z^z; commuting Z^{z_a} past X^{x_b} costs
  // (-1)^{|z_a & x_b|}.
  const std::uint64_t xc = a.x_mask() ^ b.x_mask();
  const std::uint64_t zc = a.z_mask() ^ b.z_mask();
  const int ya = popcount(a.x_mask() & a.z_mask());
  const int yb = popcount(b.x_mask() & b.z_mask());
  const int yc = popcount(xc & zc);
  const int swaps = popcount(a.z_mask() & b.x_mask());
  const int phase_power = ((ya + yb - yc + 2 * swaps) % 4 + 4) % 4;
  return PhasedTerm{phase_power, PauliTerm(a.num_qubits(), xc, zc)};
}

bool commutes(const PauliTerm& a, const PauliTerm& b) {
  check_same_n(a, b);
  const int anti = popcount(a.x_mask() & b.z_mask()) + popcount(a.z_mask() & b.x_mask());
  return (anti & 1) == 0;
}

PauliSum::PauliSum(int num_qubits, double prune_tolerance)
    : n_(num_qubits), prune_tolerance_(prune_tolerance) {
  require(num_qubits >= 1 && num_qubits <= kMaxQubits, ErrorCode::kInvalidArgument,
          "qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  require(prune_tolerance >= 0.0, ErrorCode::kInvalidArgument,
          "prune tolerance must be non-negative");
}

PauliSum::PauliSum(int num_qubits, std::vector<Term> terms, double prune_tolerance)
    : PauliSum(num_qubits, prune_tolerance) {
  for (const auto& [coefficient, term] : terms) add(coefficient, term);
}

void PauliSum::add(double coefficient, const PauliTerm& term) {
  require(term.num_qubits() == n_, ErrorCode::kDimensionMismatch,
          "term acts on " + std::to_string(term.num_qubits()) + " qubits, sum on " +
              std::to_string(n_));
  require(std::isfinite(coefficient), ErrorCode::kNumeric,
          "non-finite coefficient for term " + term.label());
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                             [](const Term& lhs, const PauliTerm& rhs) {
                               return PauliTermLess{}(lhs.second, rhs);
                             });
  if (it != terms_.end() && it->second == term) {
    it->first += coefficient;
    if (std::abs(it->first) <= prune_tolerance_) terms_.erase(it);
  } else if (std::abs(coefficient) > prune_tolerance_) {
    terms_.insert(it, Term{coefficient, term});
  }
}

double PauliSum::coefficient(const PauliTerm& term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                             [](const Term& lhs, const PauliTerm& rhs) {
                               return PauliTermLess{}(lhs.second, rhs);
                             });
  if (it != terms_.end() && it->second == term) return it->first;
  return 0.0;
}

PauliSum PauliSum::simplified(double tolerance) const {
  PauliSum out(n_, tolerance);
  for (const auto& [coefficient, term] : terms_) out.add(coefficient, term);
  return out;
}

void PauliSum::scale(double factor) {
  require(std::isfinite(factor), ErrorCode::kNumeric, "non-finite scale factor");
  if (factor == 0.0) {
    terms_.clear();
    return;
  }
  for (auto& [coefficient, term] : terms_) coefficient *= factor;
  std::erase_if(terms_, [this](const Term& t) {
    return std::abs(t.first) <= prune_tolerance_;
  });
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  require(other.n_ == n_, ErrorCode::kDimensionMismatch,
          "cannot add sums with different qubit counts");
  for (const auto& [coefficient, term] : other.terms_) add(coefficient, term);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  require(other.n_ == n_, ErrorCode::kDimensionMismatch,
          "cannot subtract sums with different qubit counts");
  for (const auto& [coefficient, term] : other.terms_) add(-coefficient, term);
  return *this;
}

PauliSum operator*(double factor, PauliSum sum) {
  sum.scale(factor);
  return sum;
}

PauliSum operator+(PauliSum lhs, const PauliSum& rhs) {
  lhs += rhs;
  return lhs;
}

PauliSum operator-(PauliSum lhs, const PauliSum& rhs) {
  lhs -= rhs;
  return lhs;
}

PauliSum linear_combination(double ca, const PauliSum& a, double cb, const PauliSum& b) {
  require(a.num_qubits() == b.num_qubits(), ErrorCode::kDimensionMismatch,
          "cannot combine sums with different qubit counts");
  PauliSum out(a.num_qubits(), std::min(a.prune_tolerance(), b.prune_tolerance()));
  for (const auto& [coefficient, term] : a.terms()) out.add(ca * coefficient, term);
  for (const auto& [coefficient, term] : b.terms()) out.add(cb * coefficient, term);
  return out;
}

Eigen::MatrixXcd to_dense(const PauliTerm& term, int dense_limit) {
  check_dense_limit(term.num_qubits(), dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << term.num_qubits();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const std::uint64_t x = term.x_mask();
  const std::uint64_t z = term.z_mask();
  const std::complex<double> base = PhasedTerm{popcount(x & z) % 4, term}.phase();
  for (std::uint64_t column = 0; column < static_cast<std::uint64_t>(dim); ++column) {
    const bool flip = popcount(column & z) & 1;
    out(static_cast<Eigen::Index>(column ^ x), static_cast<Eigen::Index>(column)) =
        flip ? -base : base;
  }
  return out;
}

Eigen::MatrixXcd to_dense(const PauliSum& sum, int dense_limit) {
  check_dense_limit(sum.num_qubits(), dense_limit);
  const Eigen::Index dim = Eigen::Index{1} << sum.num_qubits();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [coefficient, term] : sum.terms())
    out += coefficient * to_dense(term, dense_limit);
  return out;
}

}  // namespace asparent
