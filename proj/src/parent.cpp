#include "asparent/parent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace asparent {

namespace {

using nlohmann::json;

constexpr double kTinyNorm = 1e-14;

void fix_column_signs(Eigen::MatrixXd& matrix) {
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    Eigen::Index argmax = 0;
    matrix.col(c).cwiseAbs().maxCoeff(&argmax);
    if (matrix(argmax, c) < 0.0) matrix.col(c) = -matrix.col(c);
  }
}

}  // namespace

CovarianceData build_covariance(std::vector<PauliTerm> pauli_set, const StateVector& psi,
                                std::string source_state_id) {
  require(!pauli_set.empty(), ErrorCode::kInvalidArgument, "Pauli set is empty");
  const int n = psi.num_qubits();
  for (std::size_t i = 0; i < pauli_set.size(); ++i) {
    require(!pauli_set[i].is_identity(), ErrorCode::kInvalidArgument,
            "Pauli set entry " + std::to_string(i) + " is the identity");
    require(pauli_set[i].num_qubits() == n, ErrorCode::kDimensionMismatch,
            "Pauli set entry " + std::to_string(i) + " acts on " +
                std::to_string(pauli_set[i].num_qubits()) + " qubits, state on " +
                std::to_string(n));
  }

  const int m = static_cast<int>(pauli_set.size());
  Eigen::MatrixXcd applied(psi.dimension(), m);
  for (int i = 0; i < m; ++i)
    applied.col(i) = apply_pauli(pauli_set[static_cast<std::size_t>(i)], psi.amplitudes());

  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = psi.amplitudes().dot(applied.col(i)).real();

  // <P_i P_j> = <P_i psi | P_j psi>; the real part of the Gram matrix is the
  // symmetrized expectation <{P_i, P_j}>/2.
  Eigen::MatrixXd a = (applied.adjoint() * applied).real() - b * b.transpose();
  a = 0.5 * (a + a.transpose().eval());

  return CovarianceData{std::move(pauli_set), std::move(a), std::move(b), 0,
                        std::move(source_state_id)};
}

void save_covariance(const CovarianceData& cov, const std::filesystem::path& path) {
  json labels = json::array();
  for (const auto& term : cov.pauli_set) labels.push_back(term.label());
  json b = json::array();
  for (int i = 0; i < cov.b.size(); ++i) b.push_back(cov.b(i));
  json a = json::array();
  for (int r = 0; r < cov.a.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < cov.a.cols(); ++c) row.push_back(cov.a(r, c));
    a.push_back(row);
  }
  const json doc{{"format", "asparent-covariance"},
                 {"n", cov.num_qubits()},
                 {"m", cov.size()},
                 {"pauli_set", labels},
                 {"b", b},
                 {"a", a},
                 {"shots", cov.shots},
                 {"source_state_id", cov.source_state_id}};
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << "\n";
  require(out.good(), ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

CovarianceData load_covariance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& error) {
    fail(ErrorCode::kParse, path.string() + ": " + error.what());
  }
  require(doc.value("format", "") == "asparent-covariance", ErrorCode::kParse,
          path.string() + ": not an asparent covariance file");
  CovarianceData cov;
  for (const auto& label : doc.at("pauli_set"))
    cov.pauli_set.push_back(PauliTerm::parse(label.get<std::string>()));
  const int m = static_cast<int>(cov.pauli_set.size());
  require(m >= 1, ErrorCode::kParse, path.string() + ": empty Pauli set");
  cov.b.resize(m);
  int i = 0;
  for (const auto& value : doc.at("b")) cov.b(i++) = value.get<double>();
  require(i == m, ErrorCode::kParse, path.string() + ": b has wrong length");
  cov.a.resize(m, m);
  int r = 0;
  for (const auto& row : doc.at("a")) {
    require(static_cast<int>(row.size()) == m && r < m, ErrorCode::kParse,
            path.string() + ": A has wrong shape");
    for (int c = 0; c < m; ++c) cov.a(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    ++r;
  }
  require(r == m, ErrorCode::kParse, path.string() + ": A has wrong shape");
  cov.shots = doc.value("shots", 0LL);
  cov.source_state_id = doc.value("source_state_id", "");
  return cov;
}

KernelBasis kernel_basis(const CovarianceData& cov, double delta) {
  require(delta >= 0.0, ErrorCode::kInvalidArgument, "kernel threshold must be >= 0");
  const Eigen::MatrixXd symmetric = 0.5 * (cov.a + cov.a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  require(solver.info() == Eigen::Success, ErrorCode::kNumeric,
          "covariance eigendecomposition failed");
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();

  int retained = 0;
  while (retained < eigenvalues.size() && eigenvalues(retained) <= delta) ++retained;
  if (retained == 0) {
    std::ostringstream message;
    message << "covariance matrix has no kernel at threshold delta = " << delta
            << " (smallest eigenvalue " << eigenvalues(0)
            << "): the construction is unsuccessful for this trial state. Options: "
               "raise the threshold (--delta), extend the Pauli set with additional "
               "operators until a kernel direction appears, or build the set from a "
               "different source such as the generators of the circuit preparing the "
               "trial state.";
    fail(ErrorCode::kEmptyKernel, message.str());
  }

  KernelBasis kernel;
  kernel.e = solver.eigenvectors().leftCols(retained);
  fix_column_signs(kernel.e);
  kernel.delta = delta;
  kernel.eigenvalues = eigenvalues;
  kernel.gap_above = retained < eigenvalues.size()
                         ? eigenvalues(retained)
                         : std::numeric_limits<double>::infinity();
  return kernel;
}

ParentHamiltonian fold(const Eigen::VectorXd& alpha, const CovarianceData& cov) {
  const int m = cov.size();
  require(alpha.size() == m, ErrorCode::kDimensionMismatch,
          "alpha has " + std::to_string(alpha.size()) + " entries, Pauli set has " +
              std::to_string(m));
  require(alpha.norm() > 0.0, ErrorCode::kInvalidArgument, "alpha is the zero vector");
  const int n = cov.num_qubits();

  ParentHamiltonian parent;
  parent.alpha = alpha;
  parent.lambda = alpha.dot(cov.b);

  PauliSum proto(n);
  for (int i = 0; i < m; ++i) proto.add(alpha(i), cov.pauli_set[static_cast<std::size_t>(i)]);
  parent.proto = proto;

  // (proto - lambda I)^2. Diagonal products give alpha_i^2 I; anticommuting
  // pairs cancel in the symmetric double sum; commuting pairs contribute a
  // real sign on the product string.
  PauliSum folded(n);
  double offset = alpha.squaredNorm() + parent.lambda * parent.lambda;
  for (int i = 0; i < m; ++i) {
    const PauliTerm& pi = cov.pauli_set[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j) {
      const PauliTerm& pj = cov.pauli_set[static_cast<std::size_t>(j)];
      if (!commutes(pi, pj)) continue;
      const PhasedTerm product = pauli_product(pi, pj);
      const double sign = product.phase_power == 0 ? 1.0 : -1.0;
      if (product.term.is_identity())
        offset += 2.0 * alpha(i) * alpha(j) * sign;
      else
        folded.add(2.0 * alpha(i) * alpha(j) * sign, product.term);
    }
  }
  for (int i = 0; i < m; ++i)
    folded.add(-2.0 * parent.lambda * alpha(i), cov.pauli_set[static_cast<std::size_t>(i)]);

  parent.folded = QubitHamiltonian(std::move(folded), offset);
  parent.cost_value = std::numeric_limits<double>::quiet_NaN();
  return parent;
}

double exact_cost(const Eigen::VectorXd& alpha, const CovarianceData& cov,
                  const QubitHamiltonian& target, int dense_limit) {
  const ParentHamiltonian parent = fold(alpha, cov);
  require(target.num_qubits() == cov.num_qubits(), ErrorCode::kDimensionMismatch,
          "target and covariance qubit counts differ");
  const Eigen::Index dim = Eigen::Index{1} << cov.num_qubits();
  Eigen::MatrixXcd difference = to_dense(parent.folded.sum, dense_limit) -
                                to_dense(target.sum, dense_limit);
  difference +=
      (parent.folded.identity_offset - target.identity_offset) *
      Eigen::MatrixXcd::Identity(dim, dim);
  return difference.squaredNorm();
}

ReducedProblem reduce(const KernelBasis& kernel, const CovarianceData& cov,
                      const QubitHamiltonian& target, double rho) {
  require(rho >= 0.0, ErrorCode::kInvalidArgument, "penalty rho must be >= 0");
  require(target.num_qubits() == cov.num_qubits(), ErrorCode::kDimensionMismatch,
          "target and covariance qubit counts differ");
  require(kernel.e.rows() == cov.size(), ErrorCode::kDimensionMismatch,
          "kernel basis and covariance have different Pauli-set sizes");

  const int m = cov.size();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  std::size_t matched = 0;
  for (int i = 0; i < m; ++i) {
    const double coefficient = target.sum.coefficient(cov.pauli_set[static_cast<std::size_t>(i)]);
    beta(i) = coefficient;
    if (coefficient != 0.0) ++matched;
  }
  require(matched == target.sum.size(), ErrorCode::kInvalidArgument,
          "target contains Pauli terms outside the covariance set S (" +
              std::to_string(target.sum.size() - matched) + " unmatched)");

  Eigen::MatrixXd delta_bar = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (commutes(cov.pauli_set[static_cast<std::size_t>(i)],
                   cov.pauli_set[static_cast<std::size_t>(j)]))
        delta_bar(i, j) = delta_bar(j, i) = 1.0;

  ReducedProblem problem;
  problem.b_tilde = kernel.e.transpose() * cov.b;
  problem.beta_tilde = kernel.e.transpose() * beta;
  problem.delta_tilde = kernel.e.transpose() * delta_bar * kernel.e;
  problem.delta_tilde = 0.5 * (problem.delta_tilde + problem.delta_tilde.transpose().eval());
  problem.beta_norm_sq = beta.squaredNorm();
  problem.rho = rho;
  return problem;
}

double reduced_cost(const Eigen::VectorXd& x, const ReducedProblem& problem) {
  require(x.size() == problem.dim(), ErrorCode::kDimensionMismatch,
          "x has wrong length for the reduced problem");
  const double bx = problem.b_tilde.dot(x);
  const double betax = problem.beta_tilde.dot(x);
  return 4.0 * bx * bx * x.squaredNorm() + 4.0 * bx * betax +
         problem.rho * x.dot(problem.delta_tilde * x);
}

Eigen::VectorXd reduced_cost_gradient(const Eigen::VectorXd& x,
                                      const ReducedProblem& problem) {
  require(x.size() == problem.dim(), ErrorCode::kDimensionMismatch,
          "x has wrong length for the reduced problem");
  const double bx = problem.b_tilde.dot(x);
  const double betax = problem.beta_tilde.dot(x);
  return 8.0 * bx * x.squaredNorm() * problem.b_tilde + 8.0 * bx * bx * x +
         4.0 * (betax * problem.b_tilde + bx * problem.beta_tilde) +
         2.0 * problem.rho * (problem.delta_tilde * x);
}

std::vector<double> make_c_grid(double magnitude_min, double magnitude_max,
                                int points_per_sign) {
  require(magnitude_min > 0.0 && magnitude_max >= magnitude_min,
          ErrorCode::kInvalidArgument, "c-grid magnitudes must satisfy 0 < min <= max");
  require(points_per_sign >= 1, ErrorCode::kInvalidArgument,
          "c-grid needs at least one point per sign");
  std::vector<double> grid;
  grid.reserve(2 * static_cast<std::size_t>(points_per_sign));
  const double log_min = std::log10(magnitude_min);
  const double log_max = std::log10(magnitude_max);
  for (int k = 0; k < points_per_sign; ++k) {
    const double t = points_per_sign == 1
                         ? 0.0
                         : static_cast<double>(k) / (points_per_sign - 1);
    const double magnitude = std::pow(10.0, log_min + t * (log_max - log_min));
    grid.push_back(magnitude);
    grid.push_back(-magnitude);
  }
  return grid;
}

std::vector<double> default_c_grid() { return make_c_grid(1e-2, 1e2, 21); }

InitialPoint init_alpha(const ReducedProblem& problem, std::span<const double> c_grid) {
  const int dim = problem.dim();
  require(dim >= 1, ErrorCode::kInvalidArgument, "reduced problem has dimension 0");

  InitialPoint best;
  if (problem.b_tilde.norm() <= kTinyNorm) {
    // Constraint direction is absent; fall back to the unit -beta direction.
    best.fallback = true;
    if (problem.beta_tilde.norm() > kTinyNorm)
      best.x0 = -problem.beta_tilde.normalized();
    else
      best.x0 = Eigen::VectorXd::Unit(dim, 0);
    best.cost = reduced_cost(best.x0, problem);
    return best;
  }

  const double b_norm_sq = problem.b_tilde.squaredNorm();
  const double b_dot_beta = problem.b_tilde.dot(problem.beta_tilde);
  bool have_candidate = false;
  for (const double c : c_grid) {
    if (c == 0.0) continue;  // excluded: the closed form divides by c
    const double mu = (c + b_dot_beta / (2.0 * c)) / b_norm_sq;
    const Eigen::VectorXd x = -problem.beta_tilde / (2.0 * c) + mu * problem.b_tilde;
    const double cost = reduced_cost(x, problem);
    if (!std::isfinite(cost)) continue;
    if (!have_candidate || cost < best.cost) {
      best.x0 = x;
      best.c = c;
      best.cost = cost;
      have_candidate = true;
    }
  }
  require(have_candidate, ErrorCode::kInvalidArgument,
          "c-grid contained no usable value (all zero or non-finite costs)");
  return best;
}

InitialPoint init_alpha(const ReducedProblem& problem) {
  const std::vector<double> grid = default_c_grid();
  return init_alpha(problem, grid);
}

ParentHamiltonian optimize_alpha(const ReducedProblem& problem, const KernelBasis& kernel,
                                 const CovarianceData& cov, const Eigen::VectorXd& x0,
                                 const OptimizeOptions& options, OptimizerReport* report) {
  require(x0.size() == problem.dim(), ErrorCode::kDimensionMismatch,
          "x0 has wrong length for the reduced problem");
  require(options.max_iterations >= 0 && options.gradient_tolerance >= 0.0,
          ErrorCode::kInvalidArgument, "invalid optimizer options");

  Eigen::VectorXd x = x0;
  double cost = reduced_cost(x, problem);
  require(std::isfinite(cost), ErrorCode::kNumeric,
          "non-finite cost at the optimizer starting point");
  const double initial_cost = cost;

  int iteration = 0;
  double step = 1.0;
  Eigen::VectorXd gradient = reduced_cost_gradient(x, problem);
  while (iteration < options.max_iterations &&
         gradient.norm() > options.gradient_tolerance &&
         x.norm() <= options.norm_limit) {
    const double slope = gradient.squaredNorm();
    // Armijo backtracking; the previous accepted step seeds the next search.
    double trial_step = std::min(step * 2.0, 1e6);
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      const Eigen::VectorXd candidate = x - trial_step * gradient;
      const double candidate_cost = reduced_cost(candidate, problem);
      if (!std::isfinite(candidate_cost))
        fail(ErrorCode::kNumeric,
             "non-finite cost during optimization at iteration " +
                 std::to_string(iteration) + " (step " + std::to_string(trial_step) +
                 ", |x| = " + std::to_string(x.norm()) + ")");
      if (candidate_cost <= cost - options.armijo_slope * trial_step * slope) {
        x = candidate;
        cost = candidate_cost;
        step = trial_step;
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    ++iteration;
    if (!accepted) break;  // no admissible step at this scale
    gradient = reduced_cost_gradient(x, problem);
  }

  if (report) {
    report->iterations = iteration;
    report->gradient_norm = gradient.norm();
    report->initial_cost = initial_cost;
    report->final_cost = cost;
  }

  ParentHamiltonian parent = fold(kernel.e * x, cov);
  parent.cost_value = cost;
  return parent;
}

ParentArtifacts save_parent(const ParentHamiltonian& parent, const KernelBasis& kernel,
                            const OptimizerReport& report, double rho,
                            const std::filesystem::path& prefix) {
  ParentArtifacts artifacts;
  artifacts.hamiltonian_path = prefix;
  artifacts.hamiltonian_path += ".txt";
  artifacts.sidecar_path = prefix;
  artifacts.sidecar_path += ".json";

  save_hamiltonian(parent.folded, artifacts.hamiltonian_path,
                   HamiltonianFormat::kPauliText);

  json alpha = json::array();
  for (int i = 0; i < parent.alpha.size(); ++i) alpha.push_back(parent.alpha(i));
  json kernel_eigenvalues = json::array();
  for (int i = 0; i < kernel.eigenvalues.size(); ++i)
    kernel_eigenvalues.push_back(kernel.eigenvalues(i));
  const json doc{{"format", "asparent-parent"},
                 {"alpha", alpha},
                 {"lambda", parent.lambda},
                 {"cost_value", parent.cost_value},
                 {"kernel_dim", kernel.dim()},
                 {"kernel_eigenvalues", kernel_eigenvalues},
                 {"kernel_gap_above",
                  std::isfinite(kernel.gap_above) ? json(kernel.gap_above) : json()},
                 {"delta", kernel.delta},
                 {"rho", rho},
                 {"optimizer",
                  {{"iterations", report.iterations},
                   {"gradient_norm", report.gradient_norm},
                   {"initial_cost", report.initial_cost},
                   {"final_cost", report.final_cost}}}};
  std::ofstream out(artifacts.sidecar_path, std::ios::binary);
  require(out.good(), ErrorCode::kIo,
          "cannot open '" + artifacts.sidecar_path.string() + "' for writing");
  out << doc.dump(2) << "\n";
  require(out.good(), ErrorCode::kIo,
          "write to '" + artifacts.sidecar_path.string() + "' failed");
  return artifacts;
}

}  // namespace asparent
