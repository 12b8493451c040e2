#include "asparent/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace asparent {

namespace {

using nlohmann::json;

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << content;
  require(out.good(), ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

double parse_real(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  require(end == begin + token.size() && !token.empty(), ErrorCode::kParse,
          where + ": cannot parse real coefficient from '" + token + "'");
  require(std::isfinite(value), ErrorCode::kParse,
          where + ": coefficient '" + token + "' is not finite");
  return value;
}

json hamiltonian_to_json(const QubitHamiltonian& hamiltonian) {
  json terms = json::array();
  for (const auto& [coefficient, term] : hamiltonian.sum.terms())
    terms.push_back(json::array({coefficient, term.label()}));
  json meta = json::object();
  for (const auto& [key, value] : hamiltonian.metadata) meta[key] = value;
  return json{{"format", "asparent-hamiltonian"},
              {"n", hamiltonian.num_qubits()},
              {"identity_offset", hamiltonian.identity_offset},
              {"terms", terms},
              {"metadata", meta}};
}

QubitHamiltonian hamiltonian_from_json(const json& doc, const std::string& origin) {
  require(doc.is_object() && doc.contains("n") && doc.contains("terms"),
          ErrorCode::kParse, origin + ": expected an object with 'n' and 'terms'");
  const int n = doc.at("n").get<int>();
  PauliSum sum(n);
  double offset = doc.value("identity_offset", 0.0);
  for (const auto& entry : doc.at("terms")) {
    require(entry.is_array() && entry.size() == 2, ErrorCode::kParse,
            origin + ": each term must be a [coefficient, label] pair");
    const double coefficient = entry.at(0).get<double>();
    const PauliTerm term = PauliTerm::parse(entry.at(1).get<std::string>());
    require(term.num_qubits() == n, ErrorCode::kParse,
            origin + ": term '" + entry.at(1).get<std::string>() +
                "' does not act on " + std::to_string(n) + " qubits");
    if (term.is_identity())
      offset += coefficient;
    else
      sum.add(coefficient, term);
  }
  std::map<std::string, std::string> metadata;
  if (doc.contains("metadata"))
    for (const auto& [key, value] : doc.at("metadata").items())
      metadata[key] = value.get<std::string>();
  return QubitHamiltonian(std::move(sum), offset, std::move(metadata));
}

std::string hamiltonian_to_text(const QubitHamiltonian& hamiltonian) {
  std::ostringstream out;
  for (const auto& [key, value] : hamiltonian.metadata) {
    require(key.find('\n') == std::string::npos && value.find('\n') == std::string::npos &&
                key.find('=') == std::string::npos,
            ErrorCode::kInvalidArgument,
            "metadata entries may not contain newlines or '=' in keys");
    out << "# meta " << key << " = " << value << "\n";
  }
  const std::string identity(static_cast<std::size_t>(hamiltonian.num_qubits()), 'I');
  if (hamiltonian.identity_offset != 0.0)
    out << format_full(hamiltonian.identity_offset) << " " << identity << "\n";
  for (const auto& [coefficient, term] : hamiltonian.sum.terms())
    out << format_full(coefficient) << " " << term.label() << "\n";
  return out.str();
}

}  // namespace

QubitHamiltonian::QubitHamiltonian(PauliSum s, double offset,
                                   std::map<std::string, std::string> meta)
    : sum(s.num_qubits(), s.prune_tolerance()),
      identity_offset(offset),
      metadata(std::move(meta)) {
  // Split any identity component off into the offset.
  for (const auto& [coefficient, term] : s.terms()) {
    if (term.is_identity())
      identity_offset += coefficient;
    else
      sum.add(coefficient, term);
  }
}

std::vector<PauliTerm> QubitHamiltonian::pauli_set() const {
  std::vector<PauliTerm> out;
  out.reserve(sum.size());
  for (const auto& [coefficient, term] : sum.terms()) out.push_back(term);
  return out;
}

QubitHamiltonian make_hamiltonian(PauliSum sum, double identity_offset,
                                  std::map<std::string, std::string> metadata) {
  return QubitHamiltonian(std::move(sum), identity_offset, std::move(metadata));
}

HamiltonianFormat parse_format(std::string_view name) {
  if (name.empty() || name == "auto") return HamiltonianFormat::kAuto;
  if (name == "pauli-text" || name == "text") return HamiltonianFormat::kPauliText;
  if (name == "json") return HamiltonianFormat::kJson;
  fail(ErrorCode::kUnknownName,
       "unknown Hamiltonian format '" + std::string(name) +
           "' (expected pauli-text, json, or auto)");
}

namespace {

HamiltonianFormat resolve_format(const std::filesystem::path& path,
                                 HamiltonianFormat format) {
  if (format != HamiltonianFormat::kAuto) return format;
  return path.extension() == ".json" ? HamiltonianFormat::kJson
                                     : HamiltonianFormat::kPauliText;
}

}  // namespace

QubitHamiltonian parse_hamiltonian_text(std::string_view text, const std::string& origin) {
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<double, PauliTerm>> terms;
  double offset = 0.0;
  int n = 0;

  std::istringstream stream{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string where = origin + ":" + std::to_string(line_number);
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) {
      const std::string comment = trim(body.substr(hash + 1));
      if (comment.rfind("meta ", 0) == 0) {
        const std::string entry = comment.substr(5);
        const auto eq = entry.find('=');
        require(eq != std::string::npos, ErrorCode::kParse,
                where + ": metadata comment must look like '# meta key = value'");
        metadata[trim(entry.substr(0, eq))] = trim(entry.substr(eq + 1));
      }
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;

    std::istringstream fields(body);
    std::string coefficient_token, label_token, extra;
    fields >> coefficient_token >> label_token;
    require(!label_token.empty(), ErrorCode::kParse,
            where + ": expected '<coefficient> <pauli-label>'");
    require(!(fields >> extra), ErrorCode::kParse,
            where + ": unexpected trailing field '" + extra + "'");

    const double coefficient = parse_real(coefficient_token, where);
    PauliTerm term = [&] {
      try {
        return PauliTerm::parse(label_token);
      } catch (const Error& error) {
        fail(ErrorCode::kParse, where + ": " + error.what());
      }
    }();
    if (n == 0) n = term.num_qubits();
    require(term.num_qubits() == n, ErrorCode::kParse,
            where + ": label '" + label_token + "' has " +
                std::to_string(term.num_qubits()) + " qubits, previous lines had " +
                std::to_string(n));
    if (term.is_identity())
      offset += coefficient;
    else
      terms.emplace_back(coefficient, term);
  }
  require(n > 0, ErrorCode::kParse, origin + ": no Hamiltonian terms found");
  return QubitHamiltonian(PauliSum(n, std::move(terms)), offset, std::move(metadata));
}

QubitHamiltonian load_hamiltonian(const std::filesystem::path& path,
                                  HamiltonianFormat format) {
  const std::string content = read_file(path);
  switch (resolve_format(path, format)) {
    case HamiltonianFormat::kPauliText:
      return parse_hamiltonian_text(content, path.string());
    case HamiltonianFormat::kJson: {
      json doc;
      try {
        doc = json::parse(content);
      } catch (const json::exception& error) {
        fail(ErrorCode::kParse, path.string() + ": " + error.what());
      }
      return hamiltonian_from_json(doc, path.string());
    }
    case HamiltonianFormat::kAuto: break;
  }
  fail(ErrorCode::kInternal, "unresolved Hamiltonian format");
}

void save_hamiltonian(const QubitHamiltonian& hamiltonian,
                      const std::filesystem::path& path, HamiltonianFormat format) {
  switch (resolve_format(path, format)) {
    case HamiltonianFormat::kPauliText:
      write_file(path, hamiltonian_to_text(hamiltonian));
      return;
    case HamiltonianFormat::kJson:
      write_file(path, hamiltonian_to_json(hamiltonian).dump(2) + "\n");
      return;
    case HamiltonianFormat::kAuto: break;
  }
  fail(ErrorCode::kInternal, "unresolved Hamiltonian format");
}

std::string format_full(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void save_series(const Series& series, const std::filesystem::path& path) {
  require(series.names.size() == series.columns.size(), ErrorCode::kInvalidArgument,
          "series has " + std::to_string(series.names.size()) + " names but " +
              std::to_string(series.columns.size()) + " columns");
  require(!series.names.empty(), ErrorCode::kInvalidArgument, "series has no columns");
  const std::size_t rows = series.columns.front().size();
  for (const auto& column : series.columns)
    require(column.size() == rows, ErrorCode::kInvalidArgument,
            "series columns have unequal lengths");

  std::ostringstream out;
  for (std::size_t c = 0; c < series.names.size(); ++c) {
    if (c) out << ",";
    out << series.names[c];
  }
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
      if (c) out << ",";
      out << format_full(series.columns[c][r]);
    }
    out << "\n";
  }
  write_file(path, out.str());
}

QubitHamiltonian fock_from_orbital_energies(std::span<const double> energies) {
  require(!energies.empty(), ErrorCode::kInvalidArgument,
          "orbital energy list must be nonempty");
  const int orbitals = static_cast<int>(energies.size());
  const int n = 2 * orbitals;
  require(n <= kMaxQubits, ErrorCode::kInvalidArgument,
          "too many orbitals: need " + std::to_string(n) + " qubits");
  PauliSum sum(n);
  double offset = 0.0;
  for (int p = 0; p < orbitals; ++p) {
    const double eps = energies[static_cast<std::size_t>(p)];
    offset += eps;
    // eps (I - Z)/2 on the spin-up and spin-down qubit of orbital p.
    for (const int q : {p, orbitals + p})
      sum.add(-eps / 2.0, PauliTerm(n, 0, std::uint64_t{1} << q));
  }
  return QubitHamiltonian(std::move(sum), offset);
}

StateSpec StateSpec::basis(std::string bits) {
  StateSpec spec;
  spec.kind = Kind::kBasisState;
  spec.bits = std::move(bits);
  return spec;
}

StateSpec StateSpec::superposition(std::vector<std::pair<std::string, double>> entries) {
  StateSpec spec;
  spec.kind = Kind::kDeterminantSuperposition;
  spec.entries = std::move(entries);
  return spec;
}

StateSpec StateSpec::krylov(std::string reference_bits, int dimension) {
  StateSpec spec;
  spec.kind = Kind::kKrylov;
  spec.bits = std::move(reference_bits);
  spec.krylov_dimension = dimension;
  return spec;
}

StateSpec StateSpec::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& error) {
    fail(ErrorCode::kParse, std::string("state spec: ") + error.what());
  }
  require(doc.is_object() && doc.contains("kind"), ErrorCode::kParse,
          "state spec must be an object with a 'kind' field");
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "basis-state") {
    require(doc.contains("bits"), ErrorCode::kParse, "basis-state spec needs 'bits'");
    return basis(doc.at("bits").get<std::string>());
  }
  if (kind == "determinant-superposition") {
    require(doc.contains("entries"), ErrorCode::kParse,
            "determinant-superposition spec needs 'entries'");
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& entry : doc.at("entries")) {
      require(entry.is_array() && entry.size() == 2, ErrorCode::kParse,
              "each entry must be a [bits, amplitude] pair");
      entries.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<double>());
    }
    return superposition(std::move(entries));
  }
  if (kind == "krylov") {
    require(doc.contains("reference") && doc.contains("dimension"), ErrorCode::kParse,
            "krylov spec needs 'reference' and 'dimension'");
    StateSpec spec = krylov(doc.at("reference").get<std::string>(),
                            doc.at("dimension").get<int>());
    spec.overlap_threshold = doc.value("overlap_threshold", spec.overlap_threshold);
    return spec;
  }
  fail(ErrorCode::kUnknownName,
       "unknown state spec kind '" + kind +
           "' (expected basis-state, determinant-superposition, or krylov)");
}

std::string StateSpec::to_json_text() const {
  json doc;
  switch (kind) {
    case Kind::kBasisState:
      doc = {{"kind", "basis-state"}, {"bits", bits}};
      break;
    case Kind::kDeterminantSuperposition: {
      json list = json::array();
      for (const auto& [b, amplitude] : entries)
        list.push_back(json::array({b, amplitude}));
      doc = {{"kind", "determinant-superposition"}, {"entries", list}};
      break;
    }
    case Kind::kKrylov:
      doc = {{"kind", "krylov"},
             {"reference", bits},
             {"dimension", krylov_dimension},
             {"overlap_threshold", overlap_threshold}};
      break;
  }
  return doc.dump();
}

StateSpec load_state_spec(const std::filesystem::path& path) {
  return StateSpec::from_json_text(read_file(path));
}

namespace {

BuiltinSystem make_one_qubit_zx() {
  BuiltinSystem system;
  system.name = "one-qubit-zx";
  system.description = "single qubit, -Z to -X; analytic gap and T_est";
  PauliSum target(1);
  target.add(-1.0, PauliTerm::parse("X"));
  system.target = QubitHamiltonian(std::move(target), 0.0, {{"system", system.name}});
  PauliSum initial(1);
  initial.add(-1.0, PauliTerm::parse("Z"));
  system.initial = QubitHamiltonian(std::move(initial), 0.0, {{"system", system.name}});
  system.trials.push_back(StateSpec::basis("0"));
  return system;
}

BuiltinSystem make_bell_xx_zz() {
  BuiltinSystem system;
  system.name = "bell-xx-zz";
  system.description = "two qubits, target -XX - ZZ with a Bell-state trial";
  PauliSum target(2);
  target.add(-1.0, PauliTerm::parse("XX"));
  target.add(-1.0, PauliTerm::parse("ZZ"));
  system.target = QubitHamiltonian(std::move(target), 0.0, {{"system", system.name}});
  system.trials.push_back(StateSpec::superposition({{"00", 1.0}, {"11", 1.0}}));
  system.trials.push_back(StateSpec::basis("00"));
  return system;
}

// Two-determinant multireference fixture on 4 qubits (orbital-major order
// h_up, h_dn, l_up, l_dn). The double-excitation coupling
// |1100><0011| + h.c. expands into eight weight-4 Pauli strings; its
// strength is tuned so the exact ground state is
// cos(phi)|1100> - sin(phi)|0011> with phi = 0.20.
BuiltinSystem make_ch2_like() {
  constexpr double kPhi = 0.20;
  constexpr double kEpsOccupied = -1.0;
  constexpr double kEpsVirtual = 0.7;
  BuiltinSystem system;
  system.name = "ch2-like";
  system.description =
      "4-qubit two-determinant singlet fixture, ground state "
      "cos(0.20)|1100> - sin(0.20)|0011>";
  const int n = 4;
  PauliSum target(n);
  double offset = 0.0;
  PauliSum diagonal(n);
  const double eps[4] = {kEpsOccupied, kEpsOccupied, kEpsVirtual, kEpsVirtual};
  for (int q = 0; q < n; ++q) {
    offset += eps[q] / 2.0;
    diagonal.add(-eps[q] / 2.0, PauliTerm(n, 0, std::uint64_t{1} << q));
  }
  target += diagonal;

  const double energy_split = 2.0 * kEpsVirtual - 2.0 * kEpsOccupied;
  const double coupling = energy_split / 2.0 * std::tan(2.0 * kPhi);
  const std::pair<const char*, double> coupling_terms[] = {
      {"XXXX", 1.0}, {"YYYY", 1.0}, {"XXYY", -1.0}, {"YYXX", -1.0},
      {"XYXY", 1.0}, {"XYYX", 1.0}, {"YXXY", 1.0},  {"YXYX", 1.0}};
  for (const auto& [label, sign] : coupling_terms)
    target.add(coupling / 8.0 * sign, PauliTerm::parse(label));

  system.target = QubitHamiltonian(std::move(target), offset, {{"system", system.name}});
  system.initial = QubitHamiltonian(std::move(diagonal), offset, {{"system", system.name}});
  system.trials.push_back(StateSpec::superposition(
      {{"1100", std::cos(kPhi)}, {"0011", -std::sin(kPhi)}}));
  system.trials.push_back(StateSpec::basis("1100"));
  system.trials.push_back(StateSpec::krylov("1100", 4));
  return system;
}

BuiltinSystem make_tfim(int n) {
  BuiltinSystem system;
  system.name = "tfim-" + std::to_string(n);
  system.description = "open transverse-field chain, -sum ZZ - 2 sum X";
  PauliSum target(n);
  for (int q = 0; q + 1 < n; ++q)
    target.add(-1.0, PauliTerm(n, 0, (std::uint64_t{3} << q)));
  for (int q = 0; q < n; ++q)
    target.add(-2.0, PauliTerm(n, std::uint64_t{1} << q, 0));
  system.target = QubitHamiltonian(std::move(target), 0.0, {{"system", system.name}});
  PauliSum initial(n);
  for (int q = 0; q < n; ++q)
    initial.add(-1.0, PauliTerm(n, 0, std::uint64_t{1} << q));
  system.initial = QubitHamiltonian(std::move(initial), 0.0, {{"system", system.name}});
  system.trials.push_back(StateSpec::basis(std::string(static_cast<std::size_t>(n), '0')));
  return system;
}

}  // namespace

BuiltinSystem builtin_system(const std::string& name) {
  if (name == "one-qubit-zx") return make_one_qubit_zx();
  if (name == "bell-xx-zz") return make_bell_xx_zz();
  if (name == "ch2-like") return make_ch2_like();
  if (name.rfind("tfim-", 0) == 0) {
    const std::string tail = name.substr(5);
    char* end = nullptr;
    const long n = std::strtol(tail.c_str(), &end, 10);
    if (end == tail.c_str() + tail.size() && n >= 2 && n <= 10)
      return make_tfim(static_cast<int>(n));
  }
  std::string registry;
  for (const auto& entry : builtin_registry()) {
    if (!registry.empty()) registry += ", ";
    registry += entry;
  }
  fail(ErrorCode::kUnknownName,
       "unknown builtin system '" + name + "'; available: " + registry);
}

std::vector<std::string> builtin_registry() {
  return {"one-qubit-zx", "bell-xx-zz", "ch2-like", "tfim-<n> (n = 2..10)"};
}

}  // namespace asparent
