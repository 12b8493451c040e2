// asparent command-line driver. Links only the shared C API (asparent.h);
// CLI11 handles argument parsing and nlohmann/json the config plumbing.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asparent/asparent.h"

namespace {

using nlohmann::json;

[[noreturn]] void die(asp_status status, const std::string& context) {
  const json error{{"error",
                    {{"status", asp_status_name(status)},
                     {"context", context},
                     {"message", asp_last_error()}}}};
  std::cerr << error.dump(2) << "\n";
  std::exit(static_cast<int>(status));
}

void check(asp_status status, const std::string& context) {
  if (status != ASP_OK) die(status, context);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    std::cerr << "{\"error\": {\"status\": \"io-error\", \"message\": \"cannot read "
              << path << "\"}}\n";
    std::exit(static_cast<int>(ASP_ERR_IO));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct HamiltonianHandle {
  asp_hamiltonian* handle = nullptr;
  ~HamiltonianHandle() { asp_hamiltonian_free(handle); }
};

struct StateHandle {
  asp_state* handle = nullptr;
  ~StateHandle() { asp_state_free(handle); }
};

// Options shared by the subcommands that consume a target Hamiltonian and a
// trial-state specification.
struct CommonOptions {
  std::string hamiltonian_path;
  std::string format;
  std::string builtin;

  std::string trial_kind;
  std::string bits;
  std::string dets_path;
  int krylov_dim = 1;
  std::string trial_spec_path;

  std::string builtin_info;  // filled when the builtin is resolved

  void add_hamiltonian_flags(CLI::App* app) {
    app->add_option("--hamiltonian", hamiltonian_path,
                    "target Hamiltonian file (pauli-text or json)");
    app->add_option("--format", format, "file format: pauli-text, json, auto");
    app->add_option("--builtin", builtin, "bundled system name instead of a file");
  }

  void add_trial_flags(CLI::App* app) {
    app->add_option("--trial", trial_kind, "trial kind: rhf, dets, krylov");
    app->add_option("--bits", bits, "bitstring for rhf / krylov reference");
    app->add_option("--dets", dets_path, "determinant-superposition spec file (json)");
    app->add_option("--krylov-dim", krylov_dim, "Krylov space dimension d");
    app->add_option("--trial-spec", trial_spec_path, "full trial spec file (json)");
  }

  asp_hamiltonian* load_target() {
    if (builtin.empty() == hamiltonian_path.empty()) {
      std::cerr << "exactly one of --hamiltonian or --builtin is required\n";
      std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
    }
    asp_hamiltonian* target = nullptr;
    if (!builtin.empty()) {
      char* info = nullptr;
      check(asp_builtin_system(builtin.c_str(), &target, nullptr, &info),
            "resolving builtin system");
      builtin_info = info ? info : "";
      asp_string_free(info);
    } else {
      check(asp_hamiltonian_load(hamiltonian_path.c_str(),
                                 format.empty() ? nullptr : format.c_str(), &target),
            "loading " + hamiltonian_path);
    }
    return target;
  }

  std::string trial_spec_json() {
    if (!trial_spec_path.empty()) return read_file(trial_spec_path);
    if (trial_kind == "rhf") {
      if (bits.empty()) {
        std::cerr << "--trial rhf requires --bits\n";
        std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
      }
      return json{{"kind", "basis-state"}, {"bits", bits}}.dump();
    }
    if (trial_kind == "dets") {
      if (dets_path.empty()) {
        std::cerr << "--trial dets requires --dets <spec.json>\n";
        std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
      }
      return read_file(dets_path);
    }
    if (trial_kind == "krylov") {
      if (bits.empty()) {
        std::cerr << "--trial krylov requires --bits (the reference determinant)\n";
        std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
      }
      return json{{"kind", "krylov"}, {"reference", bits}, {"dimension", krylov_dim}}
          .dump();
    }
    if (!trial_kind.empty()) {
      std::cerr << "unknown --trial kind '" << trial_kind << "'\n";
      std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
    }
    // Fall back to the builtin's bundled trial, when there is one.
    if (!builtin_info.empty()) {
      const json info = json::parse(builtin_info);
      if (info.contains("trials") && !info.at("trials").empty())
        return info.at("trials").at(0).dump();
    }
    std::cerr << "a trial specification is required (--trial/--trial-spec)\n";
    std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
  }

  asp_state* build_trial(const asp_hamiltonian* target, json* detail = nullptr) {
    const std::string spec = trial_spec_json();
    asp_state* state = nullptr;
    int dim_used = 0;
    double ritz = 0.0;
    check(asp_state_from_spec_json(spec.c_str(), target, &state, &dim_used, &ritz),
          "building the trial state");
    if (detail) {
      const json parsed = json::parse(spec);
      (*detail)["trial_spec"] = parsed;
      if (parsed.value("kind", "") == "krylov") {
        (*detail)["krylov_dimension_used"] = dim_used;
        (*detail)["ritz_energy"] = ritz;
      }
    }
    return state;
  }
};

// The initial Hamiltonian for estimate/evolve: an explicit file, the Fock
// operator from orbital energies, or the builtin's bundled initial.
struct InitialOptions {
  std::string initial_path;
  std::string format;
  bool baseline_fock = false;
  std::string fock_energies_path;

  void add_flags(CLI::App* app) {
    app->add_option("--initial", initial_path,
                    "initial (parent) Hamiltonian file, e.g. a saved parent_*.txt");
    app->add_flag("--baseline-fock", baseline_fock,
                  "use the Fock operator from --fock-energies (or the builtin initial)");
    app->add_option("--fock-energies", fock_energies_path,
                    "json array of molecular-orbital energies");
  }

  asp_hamiltonian* load_initial(const std::string& builtin) {
    asp_hamiltonian* initial = nullptr;
    if (!initial_path.empty()) {
      check(asp_hamiltonian_load(initial_path.c_str(),
                                 format.empty() ? nullptr : format.c_str(), &initial),
            "loading " + initial_path);
      return initial;
    }
    if (!fock_energies_path.empty()) {
      const json doc = json::parse(read_file(fock_energies_path));
      const std::vector<double> energies = doc.get<std::vector<double>>();
      check(asp_hamiltonian_from_fock(energies.data(), energies.size(), &initial),
            "building the Fock operator");
      return initial;
    }
    if (!builtin.empty()) {
      asp_hamiltonian* target = nullptr;
      check(asp_builtin_system(builtin.c_str(), &target, &initial, nullptr),
            "resolving builtin system");
      asp_hamiltonian_free(target);
      if (initial) return initial;
    }
    std::cerr << "an initial Hamiltonian is required "
                 "(--initial, --fock-energies, or a builtin with one)\n";
    std::exit(static_cast<int>(ASP_ERR_INVALID_ARGUMENT));
  }
};

int run_covariance(CommonOptions& common, const std::string& out_path) {
  HamiltonianHandle target{common.load_target()};
  json detail;
  StateHandle trial{common.build_trial(target.handle, &detail)};

  asp_covariance* covariance = nullptr;
  check(asp_covariance_build(target.handle, trial.handle, &covariance),
        "building the covariance data");
  check(asp_covariance_save(covariance, out_path.c_str()), "writing " + out_path);

  const size_t m = asp_covariance_size(covariance);
  std::vector<double> eigenvalues(m);
  check(asp_covariance_eigenvalues(covariance, eigenvalues.data()),
        "covariance eigenvalues");
  asp_covariance_free(covariance);

  detail["m"] = m;
  detail["eigenvalues"] = eigenvalues;
  detail["out"] = out_path;
  std::cout << detail.dump(2) << "\n";
  return 0;
}

int run_parent(CommonOptions& common, const std::string& covariance_path,
               const asp_parent_options& options, const std::string& out_prefix) {
  HamiltonianHandle target{common.load_target()};

  asp_covariance* covariance = nullptr;
  json detail;
  if (!covariance_path.empty()) {
    check(asp_covariance_load(covariance_path.c_str(), &covariance),
          "loading " + covariance_path);
  } else {
    StateHandle trial{common.build_trial(target.handle, &detail)};
    check(asp_covariance_build(target.handle, trial.handle, &covariance),
          "building the covariance data");
  }

  asp_parent* parent = nullptr;
  const asp_status status = asp_parent_build(covariance, target.handle, &options, &parent);
  asp_covariance_free(covariance);
  check(status, "constructing the parent Hamiltonian");

  check(asp_parent_save(parent, out_prefix.c_str()), "writing " + out_prefix + ".*");
  detail["lambda"] = asp_parent_lambda(parent);
  detail["cost_value"] = asp_parent_cost(parent);
  detail["kernel_dim"] = asp_parent_kernel_dim(parent);
  detail["files"] = {out_prefix + ".txt", out_prefix + ".json"};
  asp_parent_free(parent);
  std::cout << detail.dump(2) << "\n";
  return 0;
}

int run_estimate(CommonOptions& common, InitialOptions& initial_options, int grid,
                 double time, int levels, const std::string& out_dir) {
  HamiltonianHandle target{common.load_target()};
  HamiltonianHandle initial{initial_options.load_initial(common.builtin)};

  asp_diagnostics* diagnostics = nullptr;
  check(asp_diagnostics_compute(initial.handle, target.handle, grid, &diagnostics),
        "computing adiabatic diagnostics");

  double t_est = 0.0, min_gap = 0.0, min_gap_s = 0.0;
  int finite = 0;
  check(asp_diagnostics_t_est(diagnostics, &t_est, &finite), "adiabatic estimate");
  check(asp_diagnostics_min_gap(diagnostics, &min_gap, &min_gap_s), "minimum gap");

  json detail{{"t_est", finite ? json(t_est) : json("inf")},
              {"t_est_finite", finite == 1},
              {"min_gap", min_gap},
              {"min_gap_s", min_gap_s},
              {"grid", grid}};

  // A vanishing estimate (commuting endpoints) gives no meaningful default horizon.
  const double horizon =
      time > 0.0 ? time : (finite && t_est > 1e-12 ? 10.0 * t_est : 0.0);
  if (horizon > 0.0 && min_gap > 0.0) {
    double bound = 0.0;
    check(asp_diagnostics_jordan_bound(diagnostics, horizon, &bound), "error bound");
    detail["jordan_bound"] = {{"time", horizon}, {"value", bound}};
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string csv = out_dir + "/gap.csv";
    check(asp_diagnostics_save_csv(diagnostics, csv.c_str(), levels), "writing " + csv);
    detail["gap_scan"] = csv;
  }
  asp_diagnostics_free(diagnostics);
  std::cout << detail.dump(2) << "\n";
  return 0;
}

int run_evolve(CommonOptions& common, InitialOptions& initial_options, double time,
               long long steps, int doublings, const std::string& mode,
               bool start_from_trial, const std::string& out_dir) {
  HamiltonianHandle target{common.load_target()};
  HamiltonianHandle initial{initial_options.load_initial(common.builtin)};

  json detail;
  StateHandle start;
  if (start_from_trial) {
    start.handle = common.build_trial(target.handle, &detail);
  } else {
    check(asp_state_ground(initial.handle, &start.handle, nullptr),
          "ground state of the initial Hamiltonian");
  }

  double horizon = time;
  if (horizon <= 0.0) {
    asp_diagnostics* diagnostics = nullptr;
    check(asp_diagnostics_compute(initial.handle, target.handle, 101, &diagnostics),
          "computing T_est for the default time");
    double t_est = 0.0;
    int finite = 0;
    check(asp_diagnostics_t_est(diagnostics, &t_est, &finite), "adiabatic estimate");
    asp_diagnostics_free(diagnostics);
    if (!finite || t_est <= 1e-12) {
      std::cerr << "no finite positive T_est; pass --time explicitly\n";
      return static_cast<int>(ASP_ERR_INVALID_ARGUMENT);
    }
    horizon = 10.0 * t_est;
  }

  StateHandle goal;
  check(asp_state_ground(target.handle, &goal.handle, nullptr),
        "ground state of the target");

  json rows = json::array();
  double final_fidelity = 0.0;
  for (int doubling = 0; doubling <= doublings; ++doubling) {
    const long long n_s = steps << doubling;
    StateHandle evolved;
    check(asp_trotter_evolve(initial.handle, target.handle, start.handle, horizon, n_s,
                             mode.c_str(), &evolved.handle),
          "Trotter evolution");
    double fidelity = 0.0;
    check(asp_state_fidelity(evolved.handle, goal.handle, &fidelity), "final fidelity");
    rows.push_back(json::array({n_s, 1.0 - fidelity}));
    final_fidelity = fidelity;
  }

  detail["time"] = horizon;
  detail["factor_mode"] = mode;
  detail["series"] = {{"columns", {"n_s", "infidelity"}}, {"rows", rows}};
  detail["final_fidelity"] = final_fidelity;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string csv = out_dir + "/evolution.csv";
    std::ofstream out(csv, std::ios::binary);
    out << "n_s,infidelity\n";
    for (const auto& row : rows) {
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), "%.17g", row.at(1).get<double>());
      out << row.at(0).get<long long>() << "," << buffer << "\n";
    }
    detail["evolution_csv"] = csv;
  }
  std::cout << detail.dump(2) << "\n";
  return 0;
}

int run_noise_study(CommonOptions& common, long long shots, uint64_t seed, double delta,
                    const std::string& out_path) {
  HamiltonianHandle target{common.load_target()};
  StateHandle trial{common.build_trial(target.handle)};

  char* report = nullptr;
  check(asp_noise_study(target.handle, trial.handle, shots, seed, delta, &report),
        "running the noise study");
  const std::string text = report;
  asp_string_free(report);

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out.good()) die(ASP_ERR_IO, "writing " + out_path);
    out << text;
  }
  std::cout << text;
  return 0;
}

int run_pipeline_command(const std::string& config_path, const json& overrides) {
  json config = json::object();
  if (!config_path.empty()) config = json::parse(read_file(config_path));
  for (const auto& [key, value] : overrides.items()) config[key] = value;

  char* summary = nullptr;
  check(asp_pipeline_run(config.dump().c_str(), &summary), "running the pipeline");
  std::cout << summary;
  asp_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parent-Hamiltonian construction and adiabatic state preparation"};
  app.require_subcommand(1);

  // covariance -------------------------------------------------------------
  auto* covariance_cmd =
      app.add_subcommand("covariance", "build exact covariance data for a trial state");
  CommonOptions covariance_common;
  covariance_common.add_hamiltonian_flags(covariance_cmd);
  covariance_common.add_trial_flags(covariance_cmd);
  std::string covariance_out = "covariance.json";
  covariance_cmd->add_option("--out", covariance_out, "output covariance file");

  // parent -----------------------------------------------------------------
  auto* parent_cmd =
      app.add_subcommand("parent", "construct an optimized folded parent Hamiltonian");
  CommonOptions parent_common;
  parent_common.add_hamiltonian_flags(parent_cmd);
  parent_common.add_trial_flags(parent_cmd);
  std::string parent_covariance;
  parent_cmd->add_option("--covariance", parent_covariance,
                         "reuse a saved covariance file instead of a trial state");
  asp_parent_options parent_options;
  asp_parent_options_default(&parent_options);
  parent_cmd->add_option("--delta", parent_options.delta, "kernel threshold");
  parent_cmd->add_option("--rho", parent_options.rho, "commuting-pair penalty");
  parent_cmd->add_option("--max-iterations", parent_options.max_iterations,
                         "optimizer iteration cap");
  std::string parent_out = "parent";
  parent_cmd->add_option("--out", parent_out, "output prefix (.txt and .json)");

  // estimate ---------------------------------------------------------------
  auto* estimate_cmd =
      app.add_subcommand("estimate", "gap scan, adiabatic estimate, error bound");
  CommonOptions estimate_common;
  InitialOptions estimate_initial;
  estimate_common.add_hamiltonian_flags(estimate_cmd);
  estimate_initial.add_flags(estimate_cmd);
  int estimate_grid = 101;
  double estimate_time = 0.0;
  int estimate_levels = 4;
  std::string estimate_out;
  estimate_cmd->add_option("--grid", estimate_grid, "number of s-grid points");
  estimate_cmd->add_option("--time", estimate_time,
                           "T_ASP for the error bound (default 10 x T_est)");
  estimate_cmd->add_option("--levels", estimate_levels, "eigenvalue columns in gap.csv");
  estimate_cmd->add_option("--out", estimate_out, "output directory for gap.csv");

  // evolve -----------------------------------------------------------------
  auto* evolve_cmd = app.add_subcommand("evolve", "Trotterized adiabatic evolution");
  CommonOptions evolve_common;
  InitialOptions evolve_initial;
  evolve_common.add_hamiltonian_flags(evolve_cmd);
  evolve_common.add_trial_flags(evolve_cmd);
  evolve_initial.add_flags(evolve_cmd);
  double evolve_time = 0.0;
  long long evolve_steps = 256;
  int evolve_doublings = 0;
  std::string evolve_mode = "exact-factor";
  bool evolve_from_trial = false;
  std::string evolve_out;
  evolve_cmd->add_option("--time", evolve_time,
                         "total evolution time (default 10 x T_est)");
  evolve_cmd->add_option("--steps", evolve_steps, "Trotter steps n_s");
  evolve_cmd->add_option("--doublings", evolve_doublings,
                         "extra runs at 2x, 4x, ... steps for the infidelity series");
  evolve_cmd->add_option("--factor-mode", evolve_mode, "exact-factor or pauli-split");
  evolve_cmd->add_flag("--from-trial", evolve_from_trial,
                       "start from the trial state instead of the initial ground state");
  evolve_cmd->add_option("--out", evolve_out, "output directory for evolution.csv");

  // noise-study ------------------------------------------------------------
  auto* noise_cmd =
      app.add_subcommand("noise-study", "sampled covariance and Davis-Kahan report");
  CommonOptions noise_common;
  noise_common.add_hamiltonian_flags(noise_cmd);
  noise_common.add_trial_flags(noise_cmd);
  long long noise_shots = 1024;
  uint64_t noise_seed = 0;
  double noise_delta = 1e-8;
  std::string noise_out;
  noise_cmd->add_option("--shots", noise_shots, "shots per measured entry");
  noise_cmd->add_option("--seed", noise_seed, "sampling seed");
  noise_cmd->add_option("--delta", noise_delta, "kernel threshold for the report");
  noise_cmd->add_option("--out", noise_out, "write the JSON report here too");

  // pipeline ---------------------------------------------------------------
  auto* pipeline_cmd = app.add_subcommand("pipeline", "full sweep from a JSON config");
  std::string pipeline_config;
  pipeline_cmd->add_option("--config", pipeline_config, "RunConfig JSON document");
  std::string p_hamiltonian, p_builtin, p_trial_kind, p_bits, p_mode, p_out;
  std::vector<int> p_krylov_dims;
  double p_delta = -1.0, p_rho = -1.0, p_time = 0.0;
  int p_grid = 0, p_workers = -1;
  long long p_steps = 0;
  uint64_t p_seed = 0;
  bool p_seed_set = false, p_baseline = false, p_evolve = false;
  pipeline_cmd->add_option("--hamiltonian", p_hamiltonian, "single Hamiltonian file");
  pipeline_cmd->add_option("--builtin", p_builtin, "bundled system name");
  pipeline_cmd->add_option("--trial", p_trial_kind, "trial kind: rhf, dets, krylov");
  pipeline_cmd->add_option("--bits", p_bits, "bitstring for the trial");
  pipeline_cmd->add_option("--krylov-dim", p_krylov_dims,
                           "Krylov dimension(s); repeat for a sweep");
  pipeline_cmd->add_option("--delta", p_delta, "kernel threshold");
  pipeline_cmd->add_option("--rho", p_rho, "commuting-pair penalty");
  pipeline_cmd->add_option("--grid", p_grid, "s-grid points");
  pipeline_cmd->add_option("--time", p_time, "evolution time");
  pipeline_cmd->add_option("--steps", p_steps, "Trotter steps");
  pipeline_cmd->add_option("--factor-mode", p_mode, "exact-factor or pauli-split");
  pipeline_cmd->add_flag("--baseline-fock", p_baseline, "standard-ASP baseline mode");
  pipeline_cmd->add_flag("--evolve", p_evolve, "run the Trotter evolution per cell");
  pipeline_cmd->add_option("--out", p_out, "output directory");
  pipeline_cmd->add_option("--seed", p_seed, "pipeline seed")
      ->each([&](const std::string&) { p_seed_set = true; });
  pipeline_cmd->add_option("--workers", p_workers, "sweep worker cap");

  CLI11_PARSE(app, argc, argv);

  if (covariance_cmd->parsed()) return run_covariance(covariance_common, covariance_out);
  if (parent_cmd->parsed())
    return run_parent(parent_common, parent_covariance, parent_options, parent_out);
  if (estimate_cmd->parsed())
    return run_estimate(estimate_common, estimate_initial, estimate_grid, estimate_time,
                        estimate_levels, estimate_out);
  if (evolve_cmd->parsed())
    return run_evolve(evolve_common, evolve_initial, evolve_time, evolve_steps,
                      evolve_doublings, evolve_mode, evolve_from_trial, evolve_out);
  if (noise_cmd->parsed())
    return run_noise_study(noise_common, noise_shots, noise_seed, noise_delta, noise_out);
  if (pipeline_cmd->parsed()) {
    json overrides = json::object();
    if (!p_hamiltonian.empty())
      overrides["hamiltonians"] = json::array({{{"path", p_hamiltonian}}});
    if (!p_builtin.empty()) overrides["builtin"] = p_builtin;
    if (!p_trial_kind.empty()) {
      if (p_trial_kind == "rhf")
        overrides["trial"] = {{"kind", "basis-state"}, {"bits", p_bits}};
      else if (p_trial_kind == "krylov")
        overrides["trial"] = {{"kind", "krylov"},
                              {"reference", p_bits},
                              {"dimension",
                               p_krylov_dims.empty() ? 1 : p_krylov_dims[0]}};
      else {
        std::cerr << "pipeline --trial supports rhf and krylov; use --config for dets\n";
        return static_cast<int>(ASP_ERR_INVALID_ARGUMENT);
      }
    }
    if (!p_krylov_dims.empty()) overrides["krylov_dims"] = p_krylov_dims;
    if (p_delta >= 0.0) overrides["delta"] = p_delta;
    if (p_rho >= 0.0) overrides["rho"] = p_rho;
    if (p_grid > 0) overrides["grid"] = p_grid;
    if (p_time > 0.0) overrides["time"] = p_time;
    if (p_steps > 0) overrides["steps"] = p_steps;
    if (!p_mode.empty()) overrides["factor_mode"] = p_mode;
    if (p_baseline) overrides["baseline_fock"] = true;
    if (p_evolve) overrides["evolve"] = true;
    if (!p_out.empty()) overrides["out"] = p_out;
    if (p_seed_set) overrides["seed"] = p_seed;
    if (p_workers >= 0) overrides["workers"] = p_workers;
    return run_pipeline_command(pipeline_config, overrides);
  }
  return 0;
}
