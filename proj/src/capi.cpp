#include "asparent/asparent.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "asparent/adiabatic.hpp"
#include "asparent/errors.hpp"
#include "asparent/ingest.hpp"
#include "asparent/noise.hpp"
#include "asparent/parent.hpp"
#include "asparent/pipeline.hpp"
#include "asparent/state.hpp"
#include "asparent/trial.hpp"

struct asp_hamiltonian {
  asparent::QubitHamiltonian value;
};

struct asp_state {
  asparent::StateVector value;
};

struct asp_covariance {
  asparent::CovarianceData value;
};

struct asp_parent {
  asparent::ParentHamiltonian parent;
  asparent::KernelBasis kernel;
  asparent::OptimizerReport report;
  double rho = 0.0;
};

struct asp_diagnostics {
  asparent::Schedule schedule;
  asparent::AdiabaticDiagnostics diagnostics;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

asp_status map_code(asparent::ErrorCode code) {
  switch (code) {
    case asparent::ErrorCode::kInvalidArgument: return ASP_ERR_INVALID_ARGUMENT;
    case asparent::ErrorCode::kParse: return ASP_ERR_PARSE;
    case asparent::ErrorCode::kIo: return ASP_ERR_IO;
    case asparent::ErrorCode::kDimensionMismatch: return ASP_ERR_DIMENSION_MISMATCH;
    case asparent::ErrorCode::kDenseLimit: return ASP_ERR_DENSE_LIMIT;
    case asparent::ErrorCode::kEmptyKernel: return ASP_ERR_EMPTY_KERNEL;
    case asparent::ErrorCode::kUnknownName: return ASP_ERR_UNKNOWN_NAME;
    case asparent::ErrorCode::kNumeric: return ASP_ERR_NUMERIC;
    case asparent::ErrorCode::kInternal: return ASP_ERR_INTERNAL;
  }
  return ASP_ERR_INTERNAL;
}

template <typename Callable>
asp_status wrap(Callable&& callable) {
  try {
    callable();
    return ASP_OK;
  } catch (const asparent::Error& error) {
    set_error(error.what());
    return map_code(error.code());
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return ASP_ERR_INTERNAL;
  } catch (const std::exception& error) {
    set_error(error.what());
    return ASP_ERR_INTERNAL;
  }
}

asp_status require_c(bool condition, const char* message) {
  if (condition) return ASP_OK;
  set_error(message);
  return ASP_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* asp_version(void) { return "0.1.0"; }

const char* asp_status_name(asp_status status) {
  switch (status) {
    case ASP_OK: return "ok";
    case ASP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case ASP_ERR_PARSE: return "parse-error";
    case ASP_ERR_IO: return "io-error";
    case ASP_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case ASP_ERR_DENSE_LIMIT: return "dense-limit";
    case ASP_ERR_EMPTY_KERNEL: return "empty-kernel";
    case ASP_ERR_UNKNOWN_NAME: return "unknown-name";
    case ASP_ERR_NUMERIC: return "numeric-error";
    case ASP_ERR_INTERNAL: return "internal-error";
  }
  return "unknown-status";
}

const char* asp_last_error(void) { return g_last_error.c_str(); }

void asp_string_free(char* text) { delete[] text; }

/* ---- Hamiltonians ------------------------------------------------------ */

asp_status asp_hamiltonian_load(const char* path, const char* format,
                                asp_hamiltonian** out) {
  if (asp_status s = require_c(path && out, "path and out must be non-null")) return s;
  return wrap([&] {
    auto loaded = asparent::load_hamiltonian(
        path, asparent::parse_format(format ? format : ""));
    *out = new asp_hamiltonian{std::move(loaded)};
  });
}

asp_status asp_hamiltonian_save(const asp_hamiltonian* hamiltonian, const char* path,
                                const char* format) {
  if (asp_status s = require_c(hamiltonian && path, "hamiltonian and path must be non-null"))
    return s;
  return wrap([&] {
    asparent::save_hamiltonian(hamiltonian->value, path,
                               asparent::parse_format(format ? format : ""));
  });
}

asp_status asp_hamiltonian_parse_text(const char* text, asp_hamiltonian** out) {
  if (asp_status s = require_c(text && out, "text and out must be non-null")) return s;
  return wrap([&] {
    *out = new asp_hamiltonian{asparent::parse_hamiltonian_text(text)};
  });
}

asp_status asp_builtin_system(const char* name, asp_hamiltonian** target,
                              asp_hamiltonian** initial, char** info_json) {
  if (asp_status s = require_c(name && target, "name and target must be non-null"))
    return s;
  return wrap([&] {
    asparent::BuiltinSystem system = asparent::builtin_system(name);
    if (info_json) {
      nlohmann::json trials = nlohmann::json::array();
      for (const auto& spec : system.trials)
        trials.push_back(nlohmann::json::parse(spec.to_json_text()));
      nlohmann::json info{{"name", system.name},
                          {"description", system.description},
                          {"n", system.target.num_qubits()},
                          {"has_initial", system.initial.has_value()},
                          {"trials", trials}};
      if (!system.orbital_energies.empty())
        info["fock_energies"] = system.orbital_energies;
      *info_json = copy_string(info.dump(2));
    }
    if (initial)
      *initial = system.initial ? new asp_hamiltonian{std::move(*system.initial)} : nullptr;
    *target = new asp_hamiltonian{std::move(system.target)};
  });
}

asp_status asp_hamiltonian_from_fock(const double* orbital_energies, size_t count,
                                     asp_hamiltonian** out) {
  if (asp_status s = require_c(orbital_energies && out && count > 0,
                               "orbital_energies must be a non-empty array"))
    return s;
  return wrap([&] {
    *out = new asp_hamiltonian{
        asparent::fock_from_orbital_energies({orbital_energies, count})};
  });
}

int asp_hamiltonian_num_qubits(const asp_hamiltonian* hamiltonian) {
  return hamiltonian ? hamiltonian->value.num_qubits() : 0;
}

size_t asp_hamiltonian_num_terms(const asp_hamiltonian* hamiltonian) {
  return hamiltonian ? hamiltonian->value.sum.size() : 0;
}

double asp_hamiltonian_identity_offset(const asp_hamiltonian* hamiltonian) {
  return hamiltonian ? hamiltonian->value.identity_offset : 0.0;
}

void asp_hamiltonian_free(asp_hamiltonian* hamiltonian) { delete hamiltonian; }

/* ---- States ------------------------------------------------------------ */

asp_status asp_state_basis(const char* bits, asp_state** out) {
  if (asp_status s = require_c(bits && out, "bits and out must be non-null")) return s;
  return wrap([&] { *out = new asp_state{asparent::basis_state(bits)}; });
}

asp_status asp_state_superposition(const char* const* bits, const double* amplitudes,
                                   size_t count, asp_state** out) {
  if (asp_status s = require_c(bits && amplitudes && out && count > 0,
                               "bits, amplitudes, and out must be non-null"))
    return s;
  return wrap([&] {
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      asparent::require(bits[i] != nullptr, asparent::ErrorCode::kInvalidArgument,
                        "bitstring " + std::to_string(i) + " is null");
      entries.emplace_back(bits[i], amplitudes[i]);
    }
    *out = new asp_state{asparent::determinant_superposition(entries)};
  });
}

asp_status asp_state_from_spec_json(const char* spec_json,
                                    const asp_hamiltonian* hamiltonian, asp_state** out,
                                    int* dim_used, double* ritz_energy) {
  if (asp_status s = require_c(spec_json && out, "spec_json and out must be non-null"))
    return s;
  return wrap([&] {
    const asparent::StateSpec spec = asparent::StateSpec::from_json_text(spec_json);
    asparent::KrylovResult info;
    asparent::StateVector state = asparent::build_trial_state(
        spec, hamiltonian ? &hamiltonian->value : nullptr, &info);
    if (spec.kind == asparent::StateSpec::Kind::kKrylov) {
      if (dim_used) *dim_used = info.dimension_used;
      if (ritz_energy) *ritz_energy = info.ritz_energy;
    }
    *out = new asp_state{std::move(state)};
  });
}

asp_status asp_state_ground(const asp_hamiltonian* hamiltonian, asp_state** out,
                            double* energy) {
  if (asp_status s = require_c(hamiltonian && out, "hamiltonian and out must be non-null"))
    return s;
  return wrap([&] {
    asparent::GroundState ground = asparent::ground_state(hamiltonian->value.sum);
    if (energy) *energy = ground.energy + hamiltonian->value.identity_offset;
    *out = new asp_state{std::move(ground.state)};
  });
}

asp_status asp_state_krylov(const asp_hamiltonian* hamiltonian, const asp_state* reference,
                            int dimension, double overlap_threshold, asp_state** out,
                            int* dim_used, double* ritz_energy) {
  if (asp_status s = require_c(hamiltonian && reference && out,
                               "hamiltonian, reference, and out must be non-null"))
    return s;
  return wrap([&] {
    asparent::KrylovResult result = asparent::krylov_ritz(
        hamiltonian->value, reference->value, dimension, overlap_threshold);
    if (dim_used) *dim_used = result.dimension_used;
    if (ritz_energy) *ritz_energy = result.ritz_energy;
    *out = new asp_state{std::move(result.state)};
  });
}

asp_status asp_state_expectation(const asp_hamiltonian* hamiltonian,
                                 const asp_state* state, double* out) {
  if (asp_status s = require_c(hamiltonian && state && out,
                               "hamiltonian, state, and out must be non-null"))
    return s;
  return wrap([&] {
    *out = asparent::expectation(hamiltonian->value.sum, state->value) +
           hamiltonian->value.identity_offset;
  });
}

asp_status asp_state_fidelity(const asp_state* a, const asp_state* b, double* out) {
  if (asp_status s = require_c(a && b && out, "a, b, and out must be non-null")) return s;
  return wrap([&] { *out = asparent::fidelity(a->value, b->value); });
}

int asp_state_num_qubits(const asp_state* state) {
  return state ? state->value.num_qubits() : 0;
}

void asp_state_free(asp_state* state) { delete state; }

/* ---- Covariance -------------------------------------------------------- */

asp_status asp_covariance_build(const asp_hamiltonian* source, const asp_state* psi,
                                asp_covariance** out) {
  if (asp_status s = require_c(source && psi && out,
                               "source, psi, and out must be non-null"))
    return s;
  return wrap([&] {
    *out = new asp_covariance{
        asparent::build_covariance(source->value.pauli_set(), psi->value)};
  });
}

asp_status asp_covariance_sample(const asp_hamiltonian* source, const asp_state* psi,
                                 long long shots, uint64_t seed, asp_covariance** out) {
  if (asp_status s = require_c(source && psi && out,
                               "source, psi, and out must be non-null"))
    return s;
  return wrap([&] {
    *out = new asp_covariance{
        asparent::sample_covariance(source->value.pauli_set(), psi->value, shots, seed)};
  });
}

asp_status asp_covariance_save(const asp_covariance* covariance, const char* path) {
  if (asp_status s = require_c(covariance && path, "covariance and path must be non-null"))
    return s;
  return wrap([&] { asparent::save_covariance(covariance->value, path); });
}

asp_status asp_covariance_load(const char* path, asp_covariance** out) {
  if (asp_status s = require_c(path && out, "path and out must be non-null")) return s;
  return wrap([&] { *out = new asp_covariance{asparent::load_covariance(path)}; });
}

size_t asp_covariance_size(const asp_covariance* covariance) {
  return covariance ? static_cast<size_t>(covariance->value.size()) : 0;
}

asp_status asp_covariance_eigenvalues(const asp_covariance* covariance, double* buffer) {
  if (asp_status s = require_c(covariance && buffer,
                               "covariance and buffer must be non-null"))
    return s;
  return wrap([&] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (covariance->value.a + covariance->value.a.transpose()));
    asparent::require(solver.info() == Eigen::Success, asparent::ErrorCode::kNumeric,
                      "covariance eigendecomposition failed");
    for (int i = 0; i < solver.eigenvalues().size(); ++i)
      buffer[i] = solver.eigenvalues()(i);
  });
}

void asp_covariance_free(asp_covariance* covariance) { delete covariance; }

/* ---- Parent construction ----------------------------------------------- */

void asp_parent_options_default(asp_parent_options* options) {
  if (!options) return;
  options->delta = asparent::kDefaultKernelDelta;
  options->rho = asparent::kDefaultPenaltyRho;
  options->c_magnitude_min = 1e-2;
  options->c_magnitude_max = 1e2;
  options->c_points_per_sign = 21;
  asparent::OptimizeOptions defaults;
  options->max_iterations = defaults.max_iterations;
  options->gradient_tolerance = defaults.gradient_tolerance;
}

asp_status asp_parent_build(const asp_covariance* covariance,
                            const asp_hamiltonian* target,
                            const asp_parent_options* options, asp_parent** out) {
  if (asp_status s = require_c(covariance && target && out,
                               "covariance, target, and out must be non-null"))
    return s;
  return wrap([&] {
    asp_parent_options defaults;
    asp_parent_options_default(&defaults);
    const asp_parent_options& opt = options ? *options : defaults;

    auto handle = std::make_unique<asp_parent>();
    handle->rho = opt.rho;
    handle->kernel = asparent::kernel_basis(covariance->value, opt.delta);
    const asparent::ReducedProblem problem =
        asparent::reduce(handle->kernel, covariance->value, target->value, opt.rho);
    const std::vector<double> c_grid = asparent::make_c_grid(
        opt.c_magnitude_min, opt.c_magnitude_max, opt.c_points_per_sign);
    const asparent::InitialPoint start = asparent::init_alpha(problem, c_grid);
    asparent::OptimizeOptions optimize_options;
    optimize_options.max_iterations = opt.max_iterations;
    optimize_options.gradient_tolerance = opt.gradient_tolerance;
    handle->parent =
        asparent::optimize_alpha(problem, handle->kernel, covariance->value, start.x0,
                                 optimize_options, &handle->report);
    *out = handle.release();
  });
}

asp_status asp_parent_hamiltonian(const asp_parent* parent, asp_hamiltonian** out) {
  if (asp_status s = require_c(parent && out, "parent and out must be non-null")) return s;
  return wrap([&] { *out = new asp_hamiltonian{parent->parent.folded}; });
}

double asp_parent_lambda(const asp_parent* parent) {
  return parent ? parent->parent.lambda : 0.0;
}

double asp_parent_cost(const asp_parent* parent) {
  return parent ? parent->parent.cost_value : 0.0;
}

int asp_parent_kernel_dim(const asp_parent* parent) {
  return parent ? parent->kernel.dim() : 0;
}

asp_status asp_parent_alpha(const asp_parent* parent, double* buffer, size_t size) {
  if (asp_status s = require_c(parent && buffer, "parent and buffer must be non-null"))
    return s;
  return wrap([&] {
    asparent::require(size >= static_cast<size_t>(parent->parent.alpha.size()),
                      asparent::ErrorCode::kInvalidArgument,
                      "alpha buffer too small: need " +
                          std::to_string(parent->parent.alpha.size()) + " entries");
    for (int i = 0; i < parent->parent.alpha.size(); ++i)
      buffer[i] = parent->parent.alpha(i);
  });
}

asp_status asp_parent_save(const asp_parent* parent, const char* prefix) {
  if (asp_status s = require_c(parent && prefix, "parent and prefix must be non-null"))
    return s;
  return wrap([&] {
    asparent::save_parent(parent->parent, parent->kernel, parent->report, parent->rho,
                          prefix);
  });
}

void asp_parent_free(asp_parent* parent) { delete parent; }

/* ---- Adiabatic diagnostics and evolution -------------------------------- */

asp_status asp_diagnostics_compute(const asp_hamiltonian* h_initial,
                                   const asp_hamiltonian* h_target, int grid_points,
                                   asp_diagnostics** out) {
  if (asp_status s = require_c(h_initial && h_target && out,
                               "h_initial, h_target, and out must be non-null"))
    return s;
  return wrap([&] {
    asparent::Schedule schedule =
        asparent::make_schedule(h_initial->value, h_target->value, grid_points);
    asparent::AdiabaticDiagnostics diagnostics = asparent::adiabatic_estimate(schedule);
    *out = new asp_diagnostics{std::move(schedule), std::move(diagnostics)};
  });
}

asp_status asp_diagnostics_t_est(const asp_diagnostics* diagnostics, double* t_est,
                                 int* finite) {
  if (asp_status s = require_c(diagnostics && t_est,
                               "diagnostics and t_est must be non-null"))
    return s;
  *t_est = diagnostics->diagnostics.t_est;
  if (finite) *finite = diagnostics->diagnostics.t_est_finite ? 1 : 0;
  return ASP_OK;
}

asp_status asp_diagnostics_min_gap(const asp_diagnostics* diagnostics, double* gap,
                                   double* at_s) {
  if (asp_status s = require_c(diagnostics && gap, "diagnostics and gap must be non-null"))
    return s;
  *gap = diagnostics->diagnostics.min_gap;
  if (at_s) *at_s = diagnostics->diagnostics.min_gap_s;
  return ASP_OK;
}

asp_status asp_diagnostics_jordan_bound(const asp_diagnostics* diagnostics, double t_asp,
                                        double* bound) {
  if (asp_status s = require_c(diagnostics && bound,
                               "diagnostics and bound must be non-null"))
    return s;
  return wrap([&] { *bound = asparent::jordan_bound(diagnostics->schedule, t_asp); });
}

asp_status asp_diagnostics_save_csv(const asp_diagnostics* diagnostics, const char* path,
                                    int levels) {
  if (asp_status s = require_c(diagnostics && path,
                               "diagnostics and path must be non-null"))
    return s;
  return wrap([&] { asparent::save_gap_csv(diagnostics->diagnostics, path, levels); });
}

void asp_diagnostics_free(asp_diagnostics* diagnostics) { delete diagnostics; }

asp_status asp_trotter_evolve(const asp_hamiltonian* h_initial,
                              const asp_hamiltonian* h_target, const asp_state* initial,
                              double time, long long steps, const char* mode,
                              asp_state** out) {
  if (asp_status s = require_c(h_initial && h_target && initial && out,
                               "h_initial, h_target, initial, and out must be non-null"))
    return s;
  return wrap([&] {
    const asparent::Schedule schedule =
        asparent::make_schedule(h_initial->value, h_target->value, 2);
    const asparent::TrotterPlan plan{
        time, steps,
        asparent::parse_factor_mode(mode ? mode : "exact-factor")};
    *out = new asp_state{asparent::trotter_evolve(schedule, plan, initial->value)};
  });
}

/* ---- Shot-noise study --------------------------------------------------- */

asp_status asp_noise_study(const asp_hamiltonian* source, const asp_state* psi,
                           long long shots, uint64_t seed, double delta,
                           char** report_json) {
  if (asp_status s = require_c(source && psi && report_json,
                               "source, psi, and report_json must be non-null"))
    return s;
  return wrap([&] {
    const asparent::NoiseStudy study = asparent::run_noise_study(
        source->value.pauli_set(), psi->value, shots, seed, delta);
    *report_json = copy_string(asparent::noise_study_json(study));
  });
}

/* ---- Pipeline ----------------------------------------------------------- */

asp_status asp_pipeline_run(const char* config_json, char** summary_json) {
  if (asp_status s = require_c(config_json != nullptr, "config_json must be non-null"))
    return s;
  return wrap([&] {
    const asparent::RunConfig config = asparent::RunConfig::from_json_text(config_json);
    const std::string summary = asparent::run_pipeline(config);
    if (summary_json) *summary_json = copy_string(summary);
  });
}

}  // extern "C"
