#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asparent/adiabatic.hpp"
#include "asparent/ingest.hpp"
#include "asparent/parent.hpp"

namespace asparent {

/// One Hamiltonian of a sweep (typically one bond scale R).
struct SweepEntry {
  std::string path;
  HamiltonianFormat format = HamiltonianFormat::kAuto;
  std::string label;
  double scale = std::numeric_limits<double>::quiet_NaN();  // R axis value
  std::vector<double> orbital_energies;  // for the Fock baseline
};

struct RunConfig {
  std::vector<SweepEntry> hamiltonians;
  std::string builtin;  // alternative to explicit files
  std::optional<StateSpec> trial;
  std::vector<int> krylov_dims;  // sweep over d; empty = use trial as-is

  double delta = kDefaultKernelDelta;
  double rho = kDefaultPenaltyRho;
  double c_magnitude_min = 1e-2;
  double c_magnitude_max = 1e2;
  int c_points_per_sign = 21;
  OptimizeOptions optimizer;

  int grid_points = 101;
  std::optional<double> evolution_time;  // default: 10 * T_est per cell
  long long steps = 256;
  int step_doublings = 0;  // extra (n_s, infidelity) rows at 2x, 4x, ...
  FactorMode factor_mode = FactorMode::kExactFactor;
  bool evolve = false;

  bool baseline_fock = false;

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  int dense_limit = kDefaultDenseLimit;
  int csv_levels = 4;
  bool save_intermediates = true;

  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

/// Runs the full pipeline (trial state, covariance, kernel, optimized parent
/// or baseline, gap scan, adiabatic estimate, optional Trotter evolution) for
/// every (Hamiltonian, Krylov-dimension) cell, writing per-cell artifacts,
/// (R, T_est) and (R, gap_parent) series, and summary.json under out_dir.
/// Returns the summary JSON text.
std::string run_pipeline(const RunConfig& config);

}  // namespace asparent
