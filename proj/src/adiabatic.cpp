#include "asparent/adiabatic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace asparent {

namespace {

void check_schedule_pair(const QubitHamiltonian& initial, const QubitHamiltonian& target) {
  require(initial.num_qubits() == target.num_qubits(), ErrorCode::kDimensionMismatch,
          "schedule endpoints act on different qubit counts (" +
              std::to_string(initial.num_qubits()) + " vs " +
              std::to_string(target.num_qubits()) + ")");
}

Eigen::MatrixXcd dense_with_offset(const QubitHamiltonian& hamiltonian, int dense_limit) {
  const Eigen::Index dim = Eigen::Index{1} << hamiltonian.num_qubits();
  Eigen::MatrixXcd out = to_dense(hamiltonian.sum, dense_limit);
  if (hamiltonian.identity_offset != 0.0)
    out += hamiltonian.identity_offset * Eigen::MatrixXcd::Identity(dim, dim);
  return out;
}

}  // namespace

Schedule::Schedule(QubitHamiltonian h_initial, QubitHamiltonian h_target,
                   std::vector<double> grid)
    : initial(std::move(h_initial)), target(std::move(h_target)), s_grid(std::move(grid)) {
  check_schedule_pair(initial, target);
  require(s_grid.size() >= 2, ErrorCode::kInvalidArgument,
          "s-grid needs at least the two endpoints");
  require(std::is_sorted(s_grid.begin(), s_grid.end()), ErrorCode::kInvalidArgument,
          "s-grid must be sorted ascending");
  require(s_grid.front() == 0.0 && s_grid.back() == 1.0, ErrorCode::kInvalidArgument,
          "s-grid must start at 0 and end at 1");
}

std::vector<double> uniform_grid(int points) {
  require(points >= 2, ErrorCode::kInvalidArgument, "grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] = static_cast<double>(k) / (points - 1);
  grid.back() = 1.0;
  return grid;
}

Schedule make_schedule(QubitHamiltonian h_initial, QubitHamiltonian h_target,
                       int grid_points) {
  return Schedule(std::move(h_initial), std::move(h_target), uniform_grid(grid_points));
}

QubitHamiltonian interpolate(const Schedule& schedule, double s) {
  require(s >= 0.0 && s <= 1.0, ErrorCode::kInvalidArgument,
          "interpolation parameter s = " + std::to_string(s) + " outside [0, 1]");
  if (s == 0.0) return schedule.initial;
  if (s == 1.0) return schedule.target;
  PauliSum sum =
      linear_combination(1.0 - s, schedule.initial.sum, s, schedule.target.sum);
  const double offset = (1.0 - s) * schedule.initial.identity_offset +
                        s * schedule.target.identity_offset;
  return QubitHamiltonian(std::move(sum), offset);
}

namespace {

AdiabaticDiagnostics scan_impl(const Schedule& schedule, int dense_limit,
                               bool with_couplings) {
  AdiabaticDiagnostics diagnostics;
  diagnostics.points.reserve(schedule.s_grid.size());
  diagnostics.min_gap = std::numeric_limits<double>::infinity();
  diagnostics.t_est = 0.0;
  diagnostics.t_est_s = 0.0;

  Eigen::MatrixXcd derivative;  // dH/ds = H_f - H_i, constant for the linear path
  if (with_couplings) {
    derivative = dense_with_offset(schedule.target, dense_limit) -
                 dense_with_offset(schedule.initial, dense_limit);
  }

  for (const double s : schedule.s_grid) {
    const QubitHamiltonian h = interpolate(schedule, s);
    const Eigen::MatrixXcd dense = dense_with_offset(h, dense_limit);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    require(solver.info() == Eigen::Success, ErrorCode::kNumeric,
            "eigendecomposition failed at s = " + std::to_string(s));

    GridPointRecord record;
    record.s = s;
    record.eigenvalues = solver.eigenvalues();
    record.gap = record.eigenvalues.size() > 1
                     ? record.eigenvalues(1) - record.eigenvalues(0)
                     : std::numeric_limits<double>::infinity();
    record.degenerate_ground = record.gap < kDegeneracyTolerance;
    record.max_coupling = std::numeric_limits<double>::quiet_NaN();
    record.t_est_term = std::numeric_limits<double>::quiet_NaN();

    if (with_couplings) {
      const Eigen::VectorXcd driven = derivative * solver.eigenvectors().col(0);
      double max_coupling = 0.0;
      double max_term = 0.0;
      for (Eigen::Index j = 1; j < record.eigenvalues.size(); ++j) {
        const double coupling = std::abs(solver.eigenvectors().col(j).dot(driven));
        const double excitation = record.eigenvalues(j) - record.eigenvalues(0);
        if (excitation < kDegeneracyTolerance) {
          // Degenerate-cluster policy: uncoupled clusters are skipped,
          // coupled ones make the estimate diverge.
          if (coupling < kDegeneracyTolerance) {
            diagnostics.degenerate_skipped = true;
            continue;
          }
          diagnostics.t_est_finite = false;
          diagnostics.t_est_s = s;
          continue;
        }
        max_coupling = std::max(max_coupling, coupling);
        max_term = std::max(max_term, coupling / (excitation * excitation));
      }
      record.max_coupling = max_coupling;
      record.t_est_term = max_term;
      if (max_term > diagnostics.t_est) {
        diagnostics.t_est = max_term;
        diagnostics.t_est_s = s;
      }
    }

    if (record.gap < diagnostics.min_gap) {
      diagnostics.min_gap = record.gap;
      diagnostics.min_gap_s = s;
    }
    diagnostics.points.push_back(std::move(record));
  }

  if (!diagnostics.t_est_finite) diagnostics.t_est = AdiabaticDiagnostics::infinity();
  return diagnostics;
}

}  // namespace

AdiabaticDiagnostics gap_scan(const Schedule& schedule, int dense_limit) {
  return scan_impl(schedule, dense_limit, /*with_couplings=*/false);
}

AdiabaticDiagnostics adiabatic_estimate(const Schedule& schedule, int dense_limit) {
  return scan_impl(schedule, dense_limit, /*with_couplings=*/true);
}

double jordan_bound(const Schedule& schedule, double t_asp, int dense_limit) {
  require(t_asp > 0.0, ErrorCode::kInvalidArgument, "T_ASP must be positive");

  const Eigen::MatrixXcd derivative = dense_with_offset(schedule.target, dense_limit) -
                                      dense_with_offset(schedule.initial, dense_limit);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(derivative);
  require(solver.info() == Eigen::Success, ErrorCode::kNumeric,
          "eigendecomposition of dH/ds failed");
  const double f1 = std::max(std::abs(solver.eigenvalues()(0)),
                             std::abs(solver.eigenvalues()(solver.eigenvalues().size() - 1)));

  const AdiabaticDiagnostics scan = gap_scan(schedule, dense_limit);
  std::vector<double> integrand(scan.points.size());
  for (std::size_t k = 0; k < scan.points.size(); ++k) {
    const double gap = scan.points[k].gap;
    require(gap > 0.0, ErrorCode::kNumeric,
            "spectral gap closes at s = " + std::to_string(scan.points[k].s) +
                "; the adiabatic bound is undefined");
    integrand[k] = 5.0 * f1 * f1 / (gap * gap * gap);
  }
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < scan.points.size(); ++k) {
    const double ds = scan.points[k + 1].s - scan.points[k].s;
    integral += 0.5 * (integrand[k] + integrand[k + 1]) * ds;
  }

  const double gap_start = scan.points.front().gap;
  const double gap_end = scan.points.back().gap;
  return (f1 / (gap_end * gap_end) + f1 / (gap_start * gap_start) + integral) / t_asp;
}

FactorMode parse_factor_mode(std::string_view name) {
  if (name == "exact-factor") return FactorMode::kExactFactor;
  if (name == "pauli-split") return FactorMode::kPauliSplit;
  fail(ErrorCode::kUnknownName, "unknown factor mode '" + std::string(name) +
                                    "' (expected exact-factor or pauli-split)");
}

std::string factor_mode_name(FactorMode mode) {
  return mode == FactorMode::kExactFactor ? "exact-factor" : "pauli-split";
}

StateVector trotter_evolve(const Schedule& schedule, const TrotterPlan& plan,
                           const StateVector& initial, int dense_limit) {
  require(plan.steps >= 1, ErrorCode::kInvalidArgument, "Trotter steps must be >= 1");
  require(plan.total_time >= 0.0, ErrorCode::kInvalidArgument,
          "Trotter time must be >= 0");
  require(initial.num_qubits() == schedule.target.num_qubits(),
          ErrorCode::kDimensionMismatch,
          "initial state and schedule act on different qubit counts");

  const double dt = plan.total_time / static_cast<double>(plan.steps);
  StateVector state = initial;
  for (long long k = 0; k < plan.steps; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(plan.steps);
    const QubitHamiltonian h = interpolate(schedule, s);
    if (plan.mode == FactorMode::kExactFactor) {
      state = evolve_exact(h.sum, dt, state, dense_limit);
      if (h.identity_offset != 0.0) {
        const std::complex<double> phase =
            std::exp(std::complex<double>(0.0, -dt * h.identity_offset));
        state = StateVector(state.num_qubits(), phase * state.amplitudes());
      }
    } else {
      Eigen::VectorXcd amplitudes = state.amplitudes();
      if (h.identity_offset != 0.0)
        amplitudes *= std::exp(std::complex<double>(0.0, -dt * h.identity_offset));
      state = StateVector(state.num_qubits(), std::move(amplitudes));
      for (const auto& [coefficient, term] : h.sum.terms())
        state = apply_exp_pauli(dt * coefficient, term, state);
    }
  }
  return state;
}

void save_gap_csv(const AdiabaticDiagnostics& diagnostics,
                  const std::filesystem::path& path, int levels) {
  require(!diagnostics.points.empty(), ErrorCode::kInvalidArgument,
          "diagnostics contain no grid points");
  const int available = static_cast<int>(diagnostics.points.front().eigenvalues.size());
  const int k = std::clamp(levels, 1, available);

  Series series;
  series.names.push_back("s");
  for (int j = 0; j < k; ++j) series.names.push_back("lambda_" + std::to_string(j));
  series.names.push_back("gap");
  series.columns.assign(series.names.size(), {});
  for (const auto& point : diagnostics.points) {
    std::size_t column = 0;
    series.columns[column++].push_back(point.s);
    for (int j = 0; j < k; ++j) series.columns[column++].push_back(point.eigenvalues(j));
    series.columns[column].push_back(point.gap);
  }
  save_series(series, path);
}

}  // namespace asparent
