// Exercises the shared-library surface exactly as an external client would:
// only asparent.h, opaque handles, and status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "asparent/asparent.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("asparent_capi_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("status names and argument validation") {
  CHECK(std::string(asp_version()).find('.') != std::string::npos);
  CHECK(std::string(asp_status_name(ASP_OK)) == "ok");
  CHECK(std::string(asp_status_name(ASP_ERR_EMPTY_KERNEL)) == "empty-kernel");

  CHECK(asp_hamiltonian_load(nullptr, nullptr, nullptr) == ASP_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(asp_last_error()) > 0);

  asp_hamiltonian* hamiltonian = nullptr;
  CHECK(asp_hamiltonian_load("/nonexistent/path.txt", nullptr, &hamiltonian) ==
        ASP_ERR_IO);
  CHECK(asp_builtin_system("bogus", &hamiltonian, nullptr, nullptr) ==
        ASP_ERR_UNKNOWN_NAME);
}

TEST_CASE("parse, save, and reload a Hamiltonian through the C API") {
  asp_hamiltonian* hamiltonian = nullptr;
  REQUIRE(asp_hamiltonian_parse_text("0.5 ZI\n0.5 IZ\n1.25 II\n", &hamiltonian) == ASP_OK);
  CHECK(asp_hamiltonian_num_qubits(hamiltonian) == 2);
  CHECK(asp_hamiltonian_num_terms(hamiltonian) == 2);
  CHECK(asp_hamiltonian_identity_offset(hamiltonian) == doctest::Approx(1.25));

  const fs::path path = temp_dir() / "h.json";
  REQUIRE(asp_hamiltonian_save(hamiltonian, path.c_str(), "json") == ASP_OK);
  asp_hamiltonian* reloaded = nullptr;
  REQUIRE(asp_hamiltonian_load(path.c_str(), nullptr, &reloaded) == ASP_OK);
  CHECK(asp_hamiltonian_num_terms(reloaded) == 2);
  asp_hamiltonian_free(hamiltonian);
  asp_hamiltonian_free(reloaded);
}

TEST_CASE("one-qubit fixture: diagnostics through the C API") {
  asp_hamiltonian* target = nullptr;
  asp_hamiltonian* initial = nullptr;
  char* info = nullptr;
  REQUIRE(asp_builtin_system("one-qubit-zx", &target, &initial, &info) == ASP_OK);
  REQUIRE(initial != nullptr);
  CHECK(std::string(info).find("one-qubit-zx") != std::string::npos);
  asp_string_free(info);

  asp_diagnostics* diagnostics = nullptr;
  REQUIRE(asp_diagnostics_compute(initial, target, 1001, &diagnostics) == ASP_OK);

  double t_est = 0.0;
  int finite = 0;
  REQUIRE(asp_diagnostics_t_est(diagnostics, &t_est, &finite) == ASP_OK);
  CHECK(finite == 1);
  CHECK(t_est == doctest::Approx(0.7071).epsilon(1e-3));

  double gap = 0.0, at_s = 0.0;
  REQUIRE(asp_diagnostics_min_gap(diagnostics, &gap, &at_s) == ASP_OK);
  CHECK(gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(at_s == doctest::Approx(0.5).epsilon(1e-3));

  double bound = 0.0;
  REQUIRE(asp_diagnostics_jordan_bound(diagnostics, 100.0, &bound) == ASP_OK);
  CHECK(bound > 0.0);
  double double_time_bound = 0.0;
  REQUIRE(asp_diagnostics_jordan_bound(diagnostics, 200.0, &double_time_bound) == ASP_OK);
  CHECK(bound == doctest::Approx(2.0 * double_time_bound).epsilon(1e-12));

  const fs::path csv = temp_dir() / "gap.csv";
  REQUIRE(asp_diagnostics_save_csv(diagnostics, csv.c_str(), 2) == ASP_OK);
  CHECK(fs::exists(csv));

  // Trotter-evolve the ground state of the initial Hamiltonian.
  asp_state* start = nullptr;
  double start_energy = 0.0;
  REQUIRE(asp_state_ground(initial, &start, &start_energy) == ASP_OK);
  CHECK(start_energy == doctest::Approx(-1.0));
  asp_state* evolved = nullptr;
  REQUIRE(asp_trotter_evolve(initial, target, start, 10.0 * t_est, 1024, "exact-factor",
                             &evolved) == ASP_OK);
  asp_state* goal = nullptr;
  REQUIRE(asp_state_ground(target, &goal, nullptr) == ASP_OK);
  double fidelity = 0.0;
  REQUIRE(asp_state_fidelity(evolved, goal, &fidelity) == ASP_OK);
  CHECK(fidelity >= 0.9);

  asp_state_free(start);
  asp_state_free(evolved);
  asp_state_free(goal);
  asp_diagnostics_free(diagnostics);
  asp_hamiltonian_free(target);
  asp_hamiltonian_free(initial);
}

TEST_CASE("bell fixture: covariance, parent, and noise study via the C API") {
  asp_hamiltonian* target = nullptr;
  char* info = nullptr;
  REQUIRE(asp_builtin_system("bell-xx-zz", &target, nullptr, &info) == ASP_OK);
  asp_string_free(info);

  const char* bits[] = {"00", "11"};
  const double amplitudes[] = {1.0, 1.0};
  asp_state* bell = nullptr;
  REQUIRE(asp_state_superposition(bits, amplitudes, 2, &bell) == ASP_OK);
  CHECK(asp_state_num_qubits(bell) == 2);

  double energy = 0.0;
  REQUIRE(asp_state_expectation(target, bell, &energy) == ASP_OK);
  CHECK(energy == doctest::Approx(-2.0));

  asp_covariance* covariance = nullptr;
  REQUIRE(asp_covariance_build(target, bell, &covariance) == ASP_OK);
  REQUIRE(asp_covariance_size(covariance) == 2);
  std::vector<double> eigenvalues(2);
  REQUIRE(asp_covariance_eigenvalues(covariance, eigenvalues.data()) == ASP_OK);
  CHECK(std::abs(eigenvalues[0]) < 1e-12);
  CHECK(std::abs(eigenvalues[1]) < 1e-12);

  const fs::path cov_path = temp_dir() / "cov.json";
  REQUIRE(asp_covariance_save(covariance, cov_path.c_str()) == ASP_OK);
  asp_covariance* reloaded = nullptr;
  REQUIRE(asp_covariance_load(cov_path.c_str(), &reloaded) == ASP_OK);
  CHECK(asp_covariance_size(reloaded) == 2);
  asp_covariance_free(reloaded);

  asp_parent* parent = nullptr;
  REQUIRE(asp_parent_build(covariance, target, nullptr, &parent) == ASP_OK);
  CHECK(asp_parent_kernel_dim(parent) == 2);
  double alpha[2] = {0, 0};
  REQUIRE(asp_parent_alpha(parent, alpha, 2) == ASP_OK);
  CHECK(std::abs(alpha[0]) > 0.0);

  asp_hamiltonian* folded = nullptr;
  REQUIRE(asp_parent_hamiltonian(parent, &folded) == ASP_OK);
  asp_state* parent_ground = nullptr;
  REQUIRE(asp_state_ground(folded, &parent_ground, nullptr) == ASP_OK);
  double overlap = 0.0;
  REQUIRE(asp_state_fidelity(parent_ground, bell, &overlap) == ASP_OK);
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));

  const fs::path prefix = temp_dir() / "parent_bell";
  REQUIRE(asp_parent_save(parent, prefix.c_str()) == ASP_OK);
  CHECK(fs::exists(prefix.string() + ".txt"));
  CHECK(fs::exists(prefix.string() + ".json"));

  char* report = nullptr;
  REQUIRE(asp_noise_study(target, bell, 256, 7, 1e-3, &report) == ASP_OK);
  CHECK(std::string(report).find("davis_kahan") != std::string::npos);
  asp_string_free(report);

  asp_state_free(parent_ground);
  asp_hamiltonian_free(folded);
  asp_parent_free(parent);
  asp_covariance_free(covariance);
  asp_state_free(bell);
  asp_hamiltonian_free(target);
}

TEST_CASE("empty kernel surfaces ASP_ERR_EMPTY_KERNEL with remediation text") {
  asp_hamiltonian* target = nullptr;
  REQUIRE(asp_builtin_system("one-qubit-zx", &target, nullptr, nullptr) == ASP_OK);
  asp_state* zero = nullptr;
  REQUIRE(asp_state_basis("0", &zero) == ASP_OK);

  // |0> has maximal variance for the single -X target term.
  asp_covariance* covariance = nullptr;
  REQUIRE(asp_covariance_build(target, zero, &covariance) == ASP_OK);
  asp_parent* parent = nullptr;
  CHECK(asp_parent_build(covariance, target, nullptr, &parent) == ASP_ERR_EMPTY_KERNEL);
  CHECK(std::string(asp_last_error()).find("unsuccessful") != std::string::npos);

  asp_covariance_free(covariance);
  asp_state_free(zero);
  asp_hamiltonian_free(target);
}

TEST_CASE("krylov trial states through the spec JSON entry point") {
  asp_hamiltonian* target = nullptr;
  REQUIRE(asp_builtin_system("ch2-like", &target, nullptr, nullptr) == ASP_OK);

  asp_state* state = nullptr;
  int dim_used = 0;
  double ritz = 0.0;
  const char* spec = R"({"kind": "krylov", "reference": "1100", "dimension": 6})";
  REQUIRE(asp_state_from_spec_json(spec, target, &state, &dim_used, &ritz) == ASP_OK);
  CHECK(dim_used >= 1);

  asp_state* ground = nullptr;
  double exact = 0.0;
  REQUIRE(asp_state_ground(target, &ground, &exact) == ASP_OK);
  CHECK(ritz >= exact - 1e-9);

  asp_state_free(state);
  asp_state_free(ground);
  asp_hamiltonian_free(target);
}

TEST_CASE("pipeline runs from a config JSON document") {
  const fs::path out = temp_dir();
  const std::string config = std::string("{\"builtin\": \"one-qubit-zx\", ") +
                             "\"baseline_fock\": true, \"grid\": 301, \"out\": \"" +
                             out.string() + "\"}";
  char* summary = nullptr;
  REQUIRE(asp_pipeline_run(config.c_str(), &summary) == ASP_OK);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("t_est") != std::string::npos);
  CHECK(fs::exists(out / "summary.json"));
  asp_string_free(summary);

  CHECK(asp_pipeline_run("{not json", nullptr) == ASP_ERR_PARSE);
}
