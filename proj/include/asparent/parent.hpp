#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asparent/ingest.hpp"
#include "asparent/state.hpp"

namespace asparent {

inline constexpr double kDefaultKernelDelta = 1e-8;
inline constexpr double kDefaultPenaltyRho = 1.0;

/// Covariance data of a Pauli set S in a state:
///   A_ij = Re<P_i P_j> - b_i b_j,   b_i = <P_i>,
/// where the real part realizes the symmetrized product <{P_i,P_j}>/2.
/// shots == 0 marks exact (statevector) expectations.
struct CovarianceData {
  std::vector<PauliTerm> pauli_set;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  long long shots = 0;
  std::string source_state_id;

  int size() const { return static_cast<int>(pauli_set.size()); }
  int num_qubits() const { return pauli_set.empty() ? 0 : pauli_set.front().num_qubits(); }
};

/// Exact covariance build. S must contain only non-identity terms.
CovarianceData build_covariance(std::vector<PauliTerm> pauli_set,
                                const StateVector& psi,
                                std::string source_state_id = {});

void save_covariance(const CovarianceData& cov, const std::filesystem::path& path);
CovarianceData load_covariance(const std::filesystem::path& path);

/// Orthonormal basis of the numerical kernel of A: eigenvectors with
/// eigenvalue <= delta. gap_above is the smallest retained-out eigenvalue
/// (+inf when the kernel is the whole space).
struct KernelBasis {
  Eigen::MatrixXd e;
  double delta = 0.0;
  Eigen::VectorXd eigenvalues;  // all m, ascending
  double gap_above = 0.0;

  int dim() const { return static_cast<int>(e.cols()); }
};

/// Throws kEmptyKernel (naming the smallest eigenvalue and remediation
/// options) when no eigenvalue lies at or below delta.
KernelBasis kernel_basis(const CovarianceData& cov, double delta = kDefaultKernelDelta);

/// A parent Hamiltonian produced by spectrum folding:
///   folded = (proto - lambda I)^2
///          = sum_ij a_i a_j P_i P_j + lambda^2 I - 2 lambda sum_i a_i P_i,
/// with lambda = b . alpha. The trial state is a 0-eigenvector of `folded`
/// whenever alpha lies in the kernel of A.
struct ParentHamiltonian {
  Eigen::VectorXd alpha;
  double lambda = 0.0;
  PauliSum proto;
  QubitHamiltonian folded;
  double cost_value = 0.0;

  ParentHamiltonian() : proto(1), folded(1) {}
};

/// Assembles the folded operator. In the symmetric double sum, anticommuting
/// (i, j) pairs cancel exactly and are skipped; commuting pairs contribute
/// 2 a_i a_j sign(P_i P_j) on the product string. Identity contributions
/// (i = j and the lambda^2 shift) accumulate into the identity offset.
ParentHamiltonian fold(const Eigen::VectorXd& alpha, const CovarianceData& cov);

/// || dense(fold(alpha)) - dense(target) ||_F^2, offsets included.
/// Validation-only: requires n <= dense_limit.
double exact_cost(const Eigen::VectorXd& alpha, const CovarianceData& cov,
                  const QubitHamiltonian& target, int dense_limit = kDefaultDenseLimit);

/// The reduced optimization problem in kernel coordinates x (alpha = E x):
///   C[x] = 4 (bt.x)^2 ||x||^2 + 4 (bt.x) (betat.x) + rho x^T dt x,
/// equal to ||2 (b.alpha) alpha + beta||^2 - ||beta||^2 + rho alpha^T dbar alpha,
/// where dbar_ij = 1 iff i != j and [P_i, P_j] = 0.
struct ReducedProblem {
  Eigen::VectorXd b_tilde;
  Eigen::VectorXd beta_tilde;
  Eigen::MatrixXd delta_tilde;
  double beta_norm_sq = 0.0;
  double rho = 0.0;

  int dim() const { return static_cast<int>(b_tilde.size()); }
};

/// beta is indexed against S; target terms absent from S are an error,
/// S members absent from the target get beta_i = 0.
ReducedProblem reduce(const KernelBasis& kernel, const CovarianceData& cov,
                      const QubitHamiltonian& target, double rho = kDefaultPenaltyRho);

double reduced_cost(const Eigen::VectorXd& x, const ReducedProblem& problem);
Eigen::VectorXd reduced_cost_gradient(const Eigen::VectorXd& x, const ReducedProblem& problem);

/// Default scan for the fixed value c = b . alpha: 21 log-spaced magnitudes
/// in [1e-2, 1e2], both signs.
std::vector<double> default_c_grid();
std::vector<double> make_c_grid(double magnitude_min, double magnitude_max,
                                int points_per_sign);

struct InitialPoint {
  Eigen::VectorXd x0;
  double c = 0.0;            // winning constraint value (0 in fallback)
  double cost = 0.0;
  bool fallback = false;     // b_tilde was (numerically) zero
};

/// For each c in the grid, minimizes ||2 c x + beta_tilde||^2 subject to
/// b_tilde . x = c in closed form,
///   x(c) = -beta_tilde/(2c) + mu(c) b_tilde,
///   mu(c) = (c + (b_tilde . beta_tilde)/(2c)) / ||b_tilde||^2,
/// and returns the candidate with the smallest reduced cost.
InitialPoint init_alpha(const ReducedProblem& problem, std::span<const double> c_grid);
InitialPoint init_alpha(const ReducedProblem& problem);

struct OptimizeOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-9;
  double armijo_slope = 1e-4;
  /// The commuting-pair penalty is indefinite, so the cost can be unbounded
  /// below along b_tilde-orthogonal directions; descent stops once the
  /// iterate norm passes this limit.
  double norm_limit = 1e8;
};

struct OptimizerReport {
  int iterations = 0;
  double gradient_norm = 0.0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

/// Gradient descent with Armijo backtracking from x0; the result never has a
/// larger reduced cost than x0. Returns fold(E x_final) with cost_value set
/// to the final reduced cost.
ParentHamiltonian optimize_alpha(const ReducedProblem& problem,
                                 const KernelBasis& kernel, const CovarianceData& cov,
                                 const Eigen::VectorXd& x0,
                                 const OptimizeOptions& options = {},
                                 OptimizerReport* report = nullptr);

/// Writes <prefix>.txt (folded Hamiltonian, pauli-text) and <prefix>.json
/// (alpha, lambda, cost_value, kernel eigenvalues, optimizer report).
struct ParentArtifacts {
  std::filesystem::path hamiltonian_path;
  std::filesystem::path sidecar_path;
};

ParentArtifacts save_parent(const ParentHamiltonian& parent, const KernelBasis& kernel,
                            const OptimizerReport& report, double rho,
                            const std::filesystem::path& prefix);

}  // namespace asparent
