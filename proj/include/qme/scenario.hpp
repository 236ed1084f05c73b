// scenario.hpp — Scenario-driven front end: parse a JSON configuration
// describing system + solver + outputs, run the pipeline, and emit
// deterministic CSV/JSON artifacts plus a run manifest.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qme/floquet.hpp"
#include "qme/liouville.hpp"
#include "qme/redfield.hpp"

namespace qme::scenario {

using json = nlohmann::json;

enum class SolverKind {
    expm,
    spectral,
    semigroup,
    trotter,
    rk45,
    piecewise,
    mcwf,
    bloch_redfield,
    pauli,
    floquet,
};

struct DriveSpec {
    CMatrix hamiltonian;
    std::string waveform; // "cos" or "sin"
    double omega = 0.0;
    double amplitude = 1.0;
};

// Parsed and builder-expanded scenario.
struct Scenario {
    std::string name;
    std::size_t dimension = 0;

    CMatrix hamiltonian;
    std::vector<LindbladChannel> channels;
    bool has_channels = false;
    std::vector<redfield::CouplingSpec> couplings;
    bool has_couplings = false;
    std::optional<floquet::FloquetProblem> floquet_problem;
    std::vector<DriveSpec> drives;

    SolverKind solver = SolverKind::expm;
    json solver_options;

    double t0 = 0.0;
    double t1 = 0.0;
    std::size_t points = 0;

    std::optional<std::uint64_t> seed;
    json initial_state;
    json outputs;
    json check;
    json raw;
};

// Parse + builder expansion. Throws ConfigError naming the offending key.
Scenario parse(const json& config);

// Structural validation without running. The optional seed stands in for a
// --seed flag. Throws ConfigError on the first violation.
void validate(const Scenario& s, std::optional<std::uint64_t> cli_seed = std::nullopt);

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool check = false;
};

struct RunReport {
    std::vector<std::string> outputs_written;
    std::string manifest_path;
    bool check_passed = true;
    std::string check_message;
};

RunReport run(const json& config, const RunOptions& opts);

// The worked scenarios shipped with the library.
const std::vector<std::string>& bundled_names();
// All embedded configs (bundled set plus extra worked examples).
std::vector<std::string> embedded_names();
bool is_embedded(const std::string& name);
const std::string& embedded_config(const std::string& name); // throws ConfigError

// Reads either an embedded scenario name or a path to a JSON file.
json load_config(const std::string& name_or_path);

std::string library_version();

} // namespace qme::scenario
