#include "asparent/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "asparent/noise.hpp"
#include "asparent/trial.hpp"

namespace asparent {

namespace {

using nlohmann::json;

std::string sanitize_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (const char c : label)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-'
                      ? c
                      : '-');
  return out.empty() ? std::string("cell") : out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << content;
  require(out.good(), ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

json config_to_json(const RunConfig& config) {
  json hamiltonians = json::array();
  for (const auto& entry : config.hamiltonians) {
    json item{{"path", entry.path}};
    if (entry.format == HamiltonianFormat::kPauliText) item["format"] = "pauli-text";
    if (entry.format == HamiltonianFormat::kJson) item["format"] = "json";
    if (!entry.label.empty()) item["label"] = entry.label;
    if (std::isfinite(entry.scale)) item["scale"] = entry.scale;
    if (!entry.orbital_energies.empty()) item["fock_energies"] = entry.orbital_energies;
    hamiltonians.push_back(item);
  }
  json doc{{"hamiltonians", hamiltonians},
           {"delta", config.delta},
           {"rho", config.rho},
           {"c_grid",
            {{"magnitude_min", config.c_magnitude_min},
             {"magnitude_max", config.c_magnitude_max},
             {"points_per_sign", config.c_points_per_sign}}},
           {"optimizer",
            {{"max_iterations", config.optimizer.max_iterations},
             {"gradient_tolerance", config.optimizer.gradient_tolerance}}},
           {"grid", config.grid_points},
           {"steps", config.steps},
           {"step_doublings", config.step_doublings},
           {"factor_mode", factor_mode_name(config.factor_mode)},
           {"evolve", config.evolve},
           {"baseline_fock", config.baseline_fock},
           {"out", config.out_dir},
           {"seed", config.seed},
           {"workers", config.workers},
           {"dense_limit", config.dense_limit},
           {"csv_levels", config.csv_levels},
           {"save_intermediates", config.save_intermediates}};
  if (!config.builtin.empty()) doc["builtin"] = config.builtin;
  if (config.trial) doc["trial"] = json::parse(config.trial->to_json_text());
  if (!config.krylov_dims.empty()) doc["krylov_dims"] = config.krylov_dims;
  if (config.evolution_time) doc["time"] = *config.evolution_time;
  return doc;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& error) {
    fail(ErrorCode::kParse, std::string("run config: ") + error.what());
  }
  require(doc.is_object(), ErrorCode::kParse, "run config must be a JSON object");

  RunConfig config;
  if (doc.contains("hamiltonians")) {
    for (const auto& item : doc.at("hamiltonians")) {
      SweepEntry entry;
      entry.path = item.at("path").get<std::string>();
      entry.format = parse_format(item.value("format", ""));
      entry.label = item.value("label", "");
      entry.scale = item.value("scale", std::numeric_limits<double>::quiet_NaN());
      if (item.contains("fock_energies"))
        entry.orbital_energies = item.at("fock_energies").get<std::vector<double>>();
      config.hamiltonians.push_back(std::move(entry));
    }
  }
  config.builtin = doc.value("builtin", "");
  if (doc.contains("trial"))
    config.trial = StateSpec::from_json_text(doc.at("trial").dump());
  if (doc.contains("krylov_dims"))
    config.krylov_dims = doc.at("krylov_dims").get<std::vector<int>>();

  config.delta = doc.value("delta", config.delta);
  config.rho = doc.value("rho", config.rho);
  if (doc.contains("c_grid")) {
    const auto& grid = doc.at("c_grid");
    config.c_magnitude_min = grid.value("magnitude_min", config.c_magnitude_min);
    config.c_magnitude_max = grid.value("magnitude_max", config.c_magnitude_max);
    config.c_points_per_sign = grid.value("points_per_sign", config.c_points_per_sign);
  }
  if (doc.contains("optimizer")) {
    const auto& optimizer = doc.at("optimizer");
    config.optimizer.max_iterations =
        optimizer.value("max_iterations", config.optimizer.max_iterations);
    config.optimizer.gradient_tolerance =
        optimizer.value("gradient_tolerance", config.optimizer.gradient_tolerance);
  }
  config.grid_points = doc.value("grid", config.grid_points);
  if (doc.contains("time")) config.evolution_time = doc.at("time").get<double>();
  config.steps = doc.value("steps", config.steps);
  config.step_doublings = doc.value("step_doublings", config.step_doublings);
  if (doc.contains("factor_mode"))
    config.factor_mode = parse_factor_mode(doc.at("factor_mode").get<std::string>());
  config.evolve = doc.value("evolve", config.evolve);
  config.baseline_fock = doc.value("baseline_fock", config.baseline_fock);
  config.out_dir = doc.value("out", config.out_dir);
  config.seed = doc.value("seed", config.seed);
  config.workers = doc.value("workers", config.workers);
  config.dense_limit = doc.value("dense_limit", config.dense_limit);
  config.csv_levels = doc.value("csv_levels", config.csv_levels);
  config.save_intermediates = doc.value("save_intermediates", config.save_intermediates);
  return config;
}

std::string RunConfig::to_json_text() const { return config_to_json(*this).dump(2); }

namespace {

struct Cell {
  std::string label;
  double scale = std::numeric_limits<double>::quiet_NaN();
  int krylov_dim = -1;  // -1: use the trial spec as-is
  QubitHamiltonian target{1};
  std::optional<QubitHamiltonian> baseline_initial;
  StateSpec trial;
};

struct CellOutcome {
  json record;
  double t_est = std::numeric_limits<double>::quiet_NaN();
  double parent_gap = std::numeric_limits<double>::quiet_NaN();
};

StateSpec trial_for_dimension(const StateSpec& base, int dimension) {
  if (dimension < 0) return base;
  StateSpec spec = base;
  if (base.kind == StateSpec::Kind::kBasisState) {
    spec = StateSpec::krylov(base.bits, dimension);
  } else {
    require(base.kind == StateSpec::Kind::kKrylov, ErrorCode::kInvalidArgument,
            "a Krylov-dimension sweep needs a krylov or basis-state trial spec "
            "(the reference bitstring)");
    spec.krylov_dimension = dimension;
  }
  return spec;
}

CellOutcome run_cell(const Cell& cell, const RunConfig& config,
                     const std::filesystem::path& out_dir) {
  CellOutcome outcome;
  json& record = outcome.record;
  record["label"] = cell.label;
  if (std::isfinite(cell.scale)) record["scale"] = cell.scale;
  if (cell.krylov_dim >= 0) record["krylov_dim"] = cell.krylov_dim;
  record["baseline"] = config.baseline_fock;
  json files = json::object();

  // Trial state (Krylov spaces are built from the target Hamiltonian).
  KrylovResult krylov_info;
  const StateVector trial_state =
      build_trial_state(cell.trial, &cell.target, &krylov_info);
  if (cell.trial.kind == StateSpec::Kind::kKrylov) {
    record["ritz_energy"] = krylov_info.ritz_energy;
    record["krylov_dimension_used"] = krylov_info.dimension_used;
  }

  // Initial Hamiltonian: optimized folded parent, or the Fock-style baseline.
  QubitHamiltonian h_initial{cell.target.num_qubits()};
  if (config.baseline_fock) {
    require(cell.baseline_initial.has_value(), ErrorCode::kInvalidArgument,
            "baseline mode requires fock_energies for '" + cell.label +
                "' (or a builtin that provides an initial Hamiltonian)");
    h_initial = *cell.baseline_initial;
  } else {
    CovarianceData covariance =
        build_covariance(cell.target.pauli_set(), trial_state, cell.label);
    if (config.save_intermediates) {
      const auto path = out_dir / ("covariance_" + cell.label + ".json");
      save_covariance(covariance, path);
      files["covariance"] = path.filename().string();
    }
    const KernelBasis kernel = kernel_basis(covariance, config.delta);
    const ReducedProblem problem = reduce(kernel, covariance, cell.target, config.rho);
    const std::vector<double> c_grid = make_c_grid(
        config.c_magnitude_min, config.c_magnitude_max, config.c_points_per_sign);
    const InitialPoint start = init_alpha(problem, c_grid);
    OptimizerReport optimizer_report;
    ParentHamiltonian parent = optimize_alpha(problem, kernel, covariance, start.x0,
                                              config.optimizer, &optimizer_report);
    const auto artifacts =
        save_parent(parent, kernel, optimizer_report, config.rho,
                    out_dir / ("parent_" + cell.label));
    files["parent_hamiltonian"] = artifacts.hamiltonian_path.filename().string();
    files["parent_sidecar"] = artifacts.sidecar_path.filename().string();
    record["lambda"] = parent.lambda;
    record["cost_value"] = parent.cost_value;
    record["kernel_dim"] = kernel.dim();
    record["init_fallback"] = start.fallback;
    h_initial = parent.folded;
    h_initial.metadata["system"] = cell.label;
    h_initial.metadata["kind"] = "folded-parent";
  }

  // Spectral gap of the initial (parent) Hamiltonian itself.
  {
    const Spectrum parent_spectrum = spectrum(h_initial.sum, config.dense_limit);
    const double offset_free_gap = parent_spectrum.eigenvalues.size() > 1
                                       ? parent_spectrum.eigenvalues(1) -
                                             parent_spectrum.eigenvalues(0)
                                       : std::numeric_limits<double>::infinity();
    outcome.parent_gap = offset_free_gap;
    record["parent_gap"] = offset_free_gap;
  }

  const Schedule schedule =
      make_schedule(h_initial, cell.target, config.grid_points);
  const AdiabaticDiagnostics diagnostics =
      adiabatic_estimate(schedule, config.dense_limit);
  {
    const auto path = out_dir / ("gap_" + cell.label + ".csv");
    save_gap_csv(diagnostics, path, config.csv_levels);
    files["gap_scan"] = path.filename().string();
  }
  outcome.t_est = diagnostics.t_est;
  record["t_est"] = diagnostics.t_est_finite ? json(diagnostics.t_est) : json("inf");
  record["t_est_finite"] = diagnostics.t_est_finite;
  record["t_est_s"] = diagnostics.t_est_s;
  record["min_gap"] = diagnostics.min_gap;
  record["min_gap_s"] = diagnostics.min_gap_s;
  record["degenerate_skipped"] = diagnostics.degenerate_skipped;

  double evolution_time = 0.0;
  if (config.evolution_time)
    evolution_time = *config.evolution_time;
  else if (diagnostics.t_est_finite && diagnostics.t_est > 1e-12)
    evolution_time = 10.0 * diagnostics.t_est;

  if (evolution_time > 0.0 && diagnostics.min_gap > 0.0) {
    record["jordan_bound"] = {{"time", evolution_time},
                              {"value", jordan_bound(schedule, evolution_time,
                                                     config.dense_limit)}};
  }

  if (config.evolve && evolution_time > 0.0) {
    const GroundState start = ground_state(h_initial.sum, config.dense_limit);
    const GroundState goal = ground_state(cell.target.sum, config.dense_limit);
    Series series;
    series.names = {"n_s", "infidelity"};
    series.columns.assign(2, {});
    double final_fidelity = 0.0;
    for (int doubling = 0; doubling <= config.step_doublings; ++doubling) {
      const long long steps = config.steps << doubling;
      const TrotterPlan plan{evolution_time, steps, config.factor_mode};
      const StateVector evolved =
          trotter_evolve(schedule, plan, start.state, config.dense_limit);
      final_fidelity = fidelity(evolved, goal.state);
      series.columns[0].push_back(static_cast<double>(steps));
      series.columns[1].push_back(1.0 - final_fidelity);
    }
    const auto path = out_dir / ("evolution_" + cell.label + ".csv");
    save_series(series, path);
    files["evolution"] = path.filename().string();
    record["final_fidelity"] = final_fidelity;
    record["evolution_time"] = evolution_time;
    record["steps"] = config.steps << config.step_doublings;
  }

  record["files"] = files;
  return outcome;
}

}  // namespace

std::string run_pipeline(const RunConfig& config) {
  require(config.hamiltonians.empty() != config.builtin.empty(),
          ErrorCode::kInvalidArgument,
          "config must provide either 'hamiltonians' or 'builtin' (exactly one)");
  require(config.grid_points >= 2, ErrorCode::kInvalidArgument,
          "grid must have at least 2 points");

  const std::filesystem::path out_dir(config.out_dir);
  std::error_code fs_error;
  std::filesystem::create_directories(out_dir, fs_error);
  require(!fs_error, ErrorCode::kIo,
          "cannot create output directory '" + out_dir.string() + "'");

  // Resolve sweep cells: Hamiltonians x Krylov dimensions.
  std::vector<Cell> cells;
  std::vector<int> dims = config.krylov_dims;
  if (dims.empty()) dims.push_back(-1);
  for (const int d : dims)
    require(d == -1 || d >= 1, ErrorCode::kInvalidArgument,
            "krylov_dims entries must be >= 1");

  auto add_cells = [&](const QubitHamiltonian& target,
                       const std::optional<QubitHamiltonian>& baseline_initial,
                       const StateSpec& trial, const std::string& base_label,
                       double scale) {
    for (const int d : dims) {
      Cell cell;
      cell.label = sanitize_label(d >= 0 ? base_label + "_d" + std::to_string(d)
                                         : base_label);
      cell.scale = scale;
      cell.krylov_dim = d;
      cell.target = target;
      cell.baseline_initial = baseline_initial;
      cell.trial = trial_for_dimension(trial, d);
      cells.push_back(std::move(cell));
    }
  };

  if (!config.builtin.empty()) {
    const BuiltinSystem system = builtin_system(config.builtin);
    StateSpec trial = config.trial.value_or(
        system.trials.empty() ? StateSpec::basis("0") : system.trials.front());
    std::optional<QubitHamiltonian> baseline = system.initial;
    if (!baseline && !system.orbital_energies.empty())
      baseline = fock_from_orbital_energies(system.orbital_energies);
    add_cells(system.target, baseline, trial, system.name,
              std::numeric_limits<double>::quiet_NaN());
  } else {
    require(config.trial.has_value(), ErrorCode::kInvalidArgument,
            "config must provide a 'trial' spec when using Hamiltonian files");
    for (const auto& entry : config.hamiltonians) {
      const QubitHamiltonian target = load_hamiltonian(entry.path, entry.format);
      std::string label = entry.label;
      if (label.empty()) {
        label = std::filesystem::path(entry.path).stem().string();
        if (std::isfinite(entry.scale)) label += "_R" + format_full(entry.scale);
      }
      std::optional<QubitHamiltonian> baseline;
      if (!entry.orbital_energies.empty())
        baseline = fock_from_orbital_energies(entry.orbital_energies);
      add_cells(target, baseline, *config.trial, label, entry.scale);
    }
  }

  // Independent cells run on a small worker pool; file names are distinct and
  // the summary is assembled in cell order, so output bytes are reproducible.
  std::vector<CellOutcome> outcomes(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cells.size()) return;
      try {
        outcomes[index] = run_cell(cells[index], config, out_dir);
      } catch (...) {
        errors[index] = std::current_exception();
      }
    }
  };
  int worker_count = config.workers > 0
                         ? config.workers
                         : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::clamp<int>(worker_count, 1, static_cast<int>(cells.size()));
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);

  // (R, T_est) and (R, parent gap) series, one pair per sweep group.
  json series_files = json::array();
  for (const int d : dims) {
    std::vector<double> scales, t_ests, gaps;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].krylov_dim != d || !std::isfinite(cells[c].scale)) continue;
      scales.push_back(cells[c].scale);
      t_ests.push_back(outcomes[c].t_est);
      gaps.push_back(outcomes[c].parent_gap);
    }
    if (scales.empty()) continue;
    const std::string group =
        config.baseline_fock ? "baseline"
                             : (d >= 0 ? "d" + std::to_string(d) : "trial");
    const auto t_est_path = out_dir / ("t_est_vs_R_" + group + ".csv");
    save_series(Series{{"R", "t_est"}, {scales, t_ests}}, t_est_path);
    series_files.push_back(t_est_path.filename().string());
    const auto gap_path = out_dir / ("parent_gap_vs_R_" + group + ".csv");
    save_series(Series{{"R", "parent_gap"}, {scales, gaps}}, gap_path);
    series_files.push_back(gap_path.filename().string());
  }

  json summary{{"config", config_to_json(config)}, {"cells", json::array()},
               {"series_files", series_files}};
  for (const auto& outcome : outcomes) summary["cells"].push_back(outcome.record);
  const std::string text = summary.dump(2) + "\n";
  write_text(out_dir / "summary.json", text);
  return text;
}

}  // namespace asparent
