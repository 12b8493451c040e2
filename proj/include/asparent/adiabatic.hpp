#pragma once

#include <limits>
#include <string>
#include <vector>

#include "asparent/ingest.hpp"
#include "asparent/state.hpp"

namespace asparent {

/// Linear interpolation schedule H(s) = (1-s) H_i + s H_f over a sorted
/// s-grid in [0, 1] that contains both endpoints.
struct Schedule {
  QubitHamiltonian initial;
  QubitHamiltonian target;
  std::vector<double> s_grid;

  Schedule(QubitHamiltonian h_initial, QubitHamiltonian h_target,
           std::vector<double> grid);
};

std::vector<double> uniform_grid(int points);

Schedule make_schedule(QubitHamiltonian h_initial, QubitHamiltonian h_target,
                       int grid_points = 101);

QubitHamiltonian interpolate(const Schedule& schedule, double s);

struct GridPointRecord {
  double s = 0.0;
  Eigen::VectorXd eigenvalues;
  double gap = 0.0;
  bool degenerate_ground = false;
  /// max_{j>0} |<phi_j| dH/ds |phi_0>| and the corresponding T_est term at
  /// this s (filled by adiabatic_estimate; NaN after gap_scan).
  double max_coupling = 0.0;
  double t_est_term = 0.0;
};

struct AdiabaticDiagnostics {
  std::vector<GridPointRecord> points;
  double min_gap = 0.0;
  double min_gap_s = 0.0;
  double t_est = 0.0;
  bool t_est_finite = true;
  double t_est_s = 0.0;
  /// Some degenerate cluster was skipped because its coupling vanished.
  bool degenerate_skipped = false;

  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
};

/// Spectrum and gap at every grid point.
AdiabaticDiagnostics gap_scan(const Schedule& schedule,
                              int dense_limit = kDefaultDenseLimit);

/// Gap scan plus the adiabatic estimate
///   T_est = max_s max_{j>0} |<phi_j(s)| dH/ds |phi_0(s)>| / (lambda_j - lambda_0)^2
/// with dH/ds = H_f - H_i. Levels within kDegeneracyTolerance of the ground
/// energy are skipped when uncoupled (< kDegeneracyTolerance) and force
/// T_est = +inf otherwise.
AdiabaticDiagnostics adiabatic_estimate(const Schedule& schedule,
                                        int dense_limit = kDefaultDenseLimit);

/// Rigorous adiabatic error bound for the linear schedule:
///   (1/T) [ f1/gap^2(1) + f1/gap^2(0) + integral_0^1 5 f1^2/gap^3 ds ]
/// with f1 = ||H_f - H_i||_2 (spectral norm); the second-derivative term
/// vanishes for linear interpolation. The integral uses the trapezoid rule
/// on the schedule grid. Throws when the gap closes on the grid.
double jordan_bound(const Schedule& schedule, double t_asp,
                    int dense_limit = kDefaultDenseLimit);

enum class FactorMode { kExactFactor, kPauliSplit };

FactorMode parse_factor_mode(std::string_view name);
std::string factor_mode_name(FactorMode mode);

struct TrotterPlan {
  double total_time = 0.0;
  long long steps = 1;
  FactorMode mode = FactorMode::kExactFactor;
};

/// First-order product formula: applies exp(-i (T/n_s) H(s_k)) for
/// s_k = k/n_s, k = 0..n_s-1. Exact-factor mode exponentiates each factor by
/// dense eigendecomposition; pauli-split mode applies one exp(-i dt c P)
/// rotation per term in canonical order (identical order every step).
StateVector trotter_evolve(const Schedule& schedule, const TrotterPlan& plan,
                           const StateVector& initial,
                           int dense_limit = kDefaultDenseLimit);

/// Writes (s, lambda_0..lambda_k, gap) rows; `levels` caps the eigenvalue
/// columns.
void save_gap_csv(const AdiabaticDiagnostics& diagnostics,
                  const std::filesystem::path& path, int levels = 4);

}  // namespace asparent
