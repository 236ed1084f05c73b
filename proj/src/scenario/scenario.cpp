// Scenario parsing, named system builders, and validation.

#include "qme/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "qme/operators.hpp"
#include "qme/rng.hpp"

namespace qme::scenario {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

double get_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number()) fail(key, "required number missing");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(key, "must be a number");
    return j[key].get<double>();
}

std::size_t get_count(const json& j, const std::string& key) {
    const double v = get_number(j, key);
    if (v < 0 || v != std::floor(v)) fail(key, "must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

cplx parse_complex(const json& j, const std::string& key) {
    if (j.is_number()) return cplx{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    fail(key, "complex entries must be [re, im] pairs (or plain reals)");
}

CMatrix parse_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) fail(key, "matrix must be a non-empty nested array");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) fail(key, "matrix rows must be arrays");
    const std::size_t cols = j[0].size();
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) fail(key, "ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(i, c) = parse_complex(j[i][c], key);
    }
    return m;
}

redfield::NoiseSpectrum parse_spectrum(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains("kind")) fail(key, "spectrum needs a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "ohmic") {
        return redfield::NoiseSpectrum::ohmic(get_number(j, "eta"), get_number(j, "omega_c"),
                                              get_number(j, "beta"));
    }
    if (kind == "tabulated") {
        if (!j.contains("samples") || !j["samples"].is_array())
            fail(key + ".samples", "required array missing");
        std::vector<std::pair<double, double>> samples;
        for (const auto& s : j["samples"]) {
            if (!s.is_array() || s.size() != 2) fail(key + ".samples", "entries are [w, S]");
            samples.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        return redfield::NoiseSpectrum::tabulated(std::move(samples));
    }
    fail(key + ".kind", "unknown spectrum kind '" + kind + "'");
}

// ----------------------------- named builders ------------------------------

void build_two_level(const json& b, Scenario& s) {
    const double delta = get_number(b, "delta");
    const double omega = get_number_or(b, "omega", 0.0);
    const double gamma_down = get_number_or(b, "gamma_down", 0.0);
    const double gamma_0 = get_number_or(b, "gamma_0", 0.0);
    s.dimension = 2;
    s.hamiltonian = CMatrix(2, 2);
    s.hamiltonian(0, 1) = omega;
    s.hamiltonian(1, 0) = omega;
    s.hamiltonian(1, 1) = delta;
    s.has_channels = true;
    s.channels.push_back({ops::ketbra(2, 0, 1), gamma_down});  // relaxation |g><e|
    s.channels.push_back({CMatrix::identity(2), gamma_0});     // identity dephasing op
}

void build_spin_boson(const json& b, Scenario& s) {
    const double epsilon0 = get_number_or(b, "epsilon0", 0.0);
    const double delta = get_number(b, "delta");
    s.dimension = 2;
    s.hamiltonian = 0.5 * epsilon0 * ops::sigma_z() + 0.5 * delta * ops::sigma_x();
    s.has_couplings = true;
    s.couplings.push_back(
        {ops::sigma_z(), redfield::NoiseSpectrum::ohmic(get_number(b, "eta"),
                                                        get_number(b, "omega_c"),
                                                        get_number(b, "beta"))});
}

void build_random_network(const json& b, Scenario& s) {
    const std::size_t n_sites = get_count(b, "n_sites");
    if (n_sites < 2) fail("system.hamiltonian.n_sites", "need at least 2 sites");
    const auto seed = static_cast<std::uint64_t>(get_number(b, "seed"));
    const double energy_scale = get_number(b, "energy_scale");
    const double coupling_scale = get_number(b, "coupling_scale");
    const double eta = get_number(b, "eta");
    const double omega_c = get_number(b, "omega_c");
    const double beta = get_number(b, "beta");

    s.dimension = n_sites;
    s.hamiltonian = CMatrix(n_sites, n_sites);
    RandomStream stream(seed, 0);
    for (std::size_t k = 0; k < n_sites; ++k)
        s.hamiltonian(k, k) = energy_scale * stream.uniform();
    for (std::size_t j = 0; j < n_sites; ++j)
        for (std::size_t k = j + 1; k < n_sites; ++k) {
            const double v = coupling_scale * (2.0 * stream.uniform() - 1.0);
            s.hamiltonian(j, k) = v;
            s.hamiltonian(k, j) = v;
        }
    s.has_couplings = true;
    for (std::size_t k = 0; k < n_sites; ++k)
        s.couplings.push_back(
            {ops::ketbra(n_sites, k, k), redfield::NoiseSpectrum::ohmic(eta, omega_c, beta)});
}

void build_driven_tls(const json& b, Scenario& s) {
    const double omega0 = get_number(b, "omega0");
    const double omega = get_number(b, "omega");
    const double gamma = get_number(b, "gamma");
    s.dimension = 2;
    s.hamiltonian = 0.5 * omega0 * ops::sigma_z();
    s.has_channels = true;
    CMatrix dephase = CMatrix::identity(2) - ops::sigma_z();
    dephase *= cplx{0.5, 0.0}; // |g><g| in the sigma_z basis
    s.channels.push_back({std::move(dephase), gamma});
    s.drives.push_back({0.5 * omega0 * ops::sigma_x(), "cos", omega, 1.0});
}

void build_floquet_cavity(const json& b, Scenario& s) {
    const double delta = get_number(b, "delta");
    const double epsilon = get_number(b, "epsilon");
    const double coupling = get_number(b, "coupling");
    const double omega = get_number(b, "omega");
    const std::size_t n_max = b.contains("n_max") ? get_count(b, "n_max") : 10;
    const int n_harmonics =
        b.contains("n_harmonics") ? static_cast<int>(get_count(b, "n_harmonics")) : 4;

    const std::size_t n_ph = n_max + 1;
    const CMatrix tls = 0.5 * delta * ops::sigma_z() + epsilon * ops::sigma_x();
    const CMatrix a = ops::annihilation(n_max);
    const CMatrix id_ph = CMatrix::identity(n_ph);
    const CMatrix id_tls = CMatrix::identity(2);

    floquet::FloquetProblem p;
    p.h0 = tensor_product(tls, id_ph) + omega * tensor_product(id_tls, ops::number_operator(n_max));
    p.h_plus = coupling * tensor_product(ops::sigma_z(), a.adjoint());
    p.h_minus = coupling * tensor_product(ops::sigma_z(), a);
    p.omega = omega;
    p.n_harmonics = n_harmonics;
    s.dimension = 2 * n_ph;
    s.floquet_problem = std::move(p);
}

// ---------------------------------------------------------------------------

SolverKind parse_solver_kind(const std::string& method) {
    if (method == "expm") return SolverKind::expm;
    if (method == "spectral") return SolverKind::spectral;
    if (method == "semigroup") return SolverKind::semigroup;
    if (method == "trotter") return SolverKind::trotter;
    if (method == "rk45") return SolverKind::rk45;
    if (method == "piecewise") return SolverKind::piecewise;
    if (method == "mcwf") return SolverKind::mcwf;
    if (method == "bloch_redfield") return SolverKind::bloch_redfield;
    if (method == "pauli") return SolverKind::pauli;
    if (method == "floquet") return SolverKind::floquet;
    fail("solver.method", "unknown solver '" + method + "'");
}

const std::set<std::string> kLindbladOutputs = {
    "populations", "coherences", "state", "expectation", "purity",
    "correlation", "spectrum", "bell_purity_sweep"};
const std::set<std::string> kRedfieldOutputs = {
    "populations", "coherences", "state", "expectation", "purity", "pauli_populations"};
const std::set<std::string> kPauliOutputs = {"populations"};
const std::set<std::string> kFloquetOutputs = {"quasi_energies", "transition_probability"};

} // namespace

Scenario parse(const json& config) {
    if (!config.is_object()) throw ConfigError("config root must be a JSON object");
    Scenario s;
    s.raw = config;
    if (!config.contains("name") || !config["name"].is_string())
        fail("name", "required string missing");
    s.name = config["name"].get<std::string>();

    if (!config.contains("system") || !config["system"].is_object())
        fail("system", "required object missing");
    const json& sys = config["system"];

    const bool has_channels_key = sys.contains("channels");
    const bool has_couplings_key = sys.contains("couplings");
    const bool has_floquet_key = sys.contains("floquet");

    // Hamiltonian: explicit matrix or named builder.
    if (sys.contains("hamiltonian")) {
        const json& h = sys["hamiltonian"];
        if (h.is_object()) {
            if (!h.contains("builder")) fail("system.hamiltonian.builder", "missing");
            const std::string builder = h["builder"].get<std::string>();
            if (builder == "two_level") build_two_level(h, s);
            else if (builder == "spin_boson") build_spin_boson(h, s);
            else if (builder == "random_network") build_random_network(h, s);
            else if (builder == "driven_tls") build_driven_tls(h, s);
            else if (builder == "floquet_cavity") build_floquet_cavity(h, s);
            else fail("system.hamiltonian.builder", "unknown builder '" + builder + "'");
        } else {
            s.hamiltonian = parse_matrix(h, "system.hamiltonian");
            s.dimension = s.hamiltonian.rows();
        }
    } else if (!has_floquet_key) {
        fail("system.hamiltonian", "required (matrix or builder) unless a floquet block is given");
    }

    if (has_channels_key) {
        s.has_channels = true;
        if (!sys["channels"].is_array()) fail("system.channels", "must be an array");
        for (std::size_t k = 0; k < sys["channels"].size(); ++k) {
            const json& ch = sys["channels"][k];
            const std::string key = "system.channels[" + std::to_string(k) + "]";
            if (!ch.is_object() || !ch.contains("operator")) fail(key + ".operator", "missing");
            LindbladChannel channel{parse_matrix(ch["operator"], key + ".operator"),
                                    get_number(ch, "rate")};
            s.channels.push_back(std::move(channel));
        }
    }
    if (has_couplings_key) {
        s.has_couplings = true;
        if (!sys["couplings"].is_array()) fail("system.couplings", "must be an array");
        for (std::size_t k = 0; k < sys["couplings"].size(); ++k) {
            const json& cp = sys["couplings"][k];
            const std::string key = "system.couplings[" + std::to_string(k) + "]";
            if (!cp.is_object() || !cp.contains("operator")) fail(key + ".operator", "missing");
            if (!cp.contains("spectrum")) fail(key + ".spectrum", "missing");
            s.couplings.push_back({parse_matrix(cp["operator"], key + ".operator"),
                                   parse_spectrum(cp["spectrum"], key + ".spectrum")});
        }
    }
    if (has_floquet_key) {
        const json& f = sys["floquet"];
        floquet::FloquetProblem p;
        p.h0 = parse_matrix(f.at("h0"), "system.floquet.h0");
        p.h_plus = parse_matrix(f.at("h_plus"), "system.floquet.h_plus");
        p.h_minus = f.contains("h_minus")
                        ? parse_matrix(f["h_minus"], "system.floquet.h_minus")
                        : p.h_plus.adjoint();
        p.omega = get_number(f, "omega");
        p.n_harmonics = f.contains("n_harmonics")
                            ? static_cast<int>(get_count(f, "n_harmonics"))
                            : 4;
        s.dimension = p.h0.rows();
        s.floquet_problem = std::move(p);
    }
    if (sys.contains("drives")) {
        if (!sys["drives"].is_array()) fail("system.drives", "must be an array");
        for (std::size_t k = 0; k < sys["drives"].size(); ++k) {
            const json& dr = sys["drives"][k];
            const std::string key = "system.drives[" + std::to_string(k) + "]";
            DriveSpec d;
            d.hamiltonian = parse_matrix(dr.at("hamiltonian"), key + ".hamiltonian");
            d.waveform = dr.value("waveform", std::string("cos"));
            d.omega = get_number(dr, "omega");
            d.amplitude = get_number_or(dr, "amplitude", 1.0);
            s.drives.push_back(std::move(d));
        }
    }

    if (sys.contains("dimension")) {
        const std::size_t declared = get_count(sys, "dimension");
        if (s.dimension != 0 && declared != s.dimension)
            fail("system.dimension", "does not match the constructed system");
        s.dimension = declared;
    }

    if (!config.contains("solver") || !config["solver"].is_object())
        fail("solver", "required object missing");
    s.solver = parse_solver_kind(config["solver"].value("method", std::string()));
    s.solver_options = config["solver"];

    if (!config.contains("times") || !config["times"].is_object())
        fail("times", "required object missing");
    s.t0 = get_number(config["times"], "t0");
    s.t1 = get_number(config["times"], "t1");
    s.points = get_count(config["times"], "points");

    if (config.contains("seed")) {
        if (!config["seed"].is_number_unsigned() && !config["seed"].is_number_integer())
            fail("seed", "must be an integer");
        s.seed = config["seed"].get<std::uint64_t>();
    }
    s.initial_state = config.value("initial_state", json());
    if (!config.contains("outputs") || !config["outputs"].is_array())
        fail("outputs", "required array missing");
    s.outputs = config["outputs"];
    s.check = config.value("check", json());
    return s;
}

void validate(const Scenario& s, std::optional<std::uint64_t> cli_seed) {
    const int system_kinds = int(s.has_channels) + int(s.has_couplings) +
                             int(s.floquet_problem.has_value());
    if (system_kinds != 1)
        throw ConfigError(
            "config key 'system': exactly one of channels/couplings/floquet required, found " +
            std::to_string(system_kinds));

    if (!s.floquet_problem) {
        if (!s.hamiltonian.is_square() || s.hamiltonian.rows() != s.dimension)
            fail("system.hamiltonian", "square matrix of the declared dimension required");
        if (!s.hamiltonian.is_hermitian(1e-10))
            fail("system.hamiltonian", "must be Hermitian");
    } else {
        s.floquet_problem->validate();
    }

    for (std::size_t k = 0; k < s.channels.size(); ++k) {
        const std::string key = "system.channels[" + std::to_string(k) + "]";
        if (!s.channels[k].op.is_square() || s.channels[k].op.rows() != s.dimension)
            fail(key + ".operator", "must be square with the system dimension");
        if (s.channels[k].rate < 0.0)
            fail(key + ".rate", "negative rate " + std::to_string(s.channels[k].rate));
    }
    for (std::size_t k = 0; k < s.couplings.size(); ++k) {
        const std::string key = "system.couplings[" + std::to_string(k) + "]";
        if (!s.couplings[k].op.is_square() || s.couplings[k].op.rows() != s.dimension)
            fail(key + ".operator", "must be square with the system dimension");
        if (!s.couplings[k].op.is_hermitian(1e-10))
            fail(key + ".operator", "must be Hermitian");
    }
    for (std::size_t k = 0; k < s.drives.size(); ++k) {
        const std::string key = "system.drives[" + std::to_string(k) + "]";
        if (!s.drives[k].hamiltonian.is_square() ||
            s.drives[k].hamiltonian.rows() != s.dimension)
            fail(key + ".hamiltonian", "must be square with the system dimension");
        if (s.drives[k].waveform != "cos" && s.drives[k].waveform != "sin")
            fail(key + ".waveform", "must be 'cos' or 'sin'");
    }

    const bool lindblad_solver =
        s.solver == SolverKind::expm || s.solver == SolverKind::spectral ||
        s.solver == SolverKind::semigroup || s.solver == SolverKind::trotter ||
        s.solver == SolverKind::rk45 || s.solver == SolverKind::piecewise ||
        s.solver == SolverKind::mcwf;
    if (lindblad_solver && !s.has_channels)
        fail("solver.method", "this solver requires a channels system");
    if ((s.solver == SolverKind::bloch_redfield || s.solver == SolverKind::pauli) &&
        !s.has_couplings)
        fail("solver.method", "this solver requires a couplings system");
    if (s.solver == SolverKind::floquet && !s.floquet_problem)
        fail("solver.method", "the floquet solver requires a floquet block");
    if (s.solver == SolverKind::piecewise && s.drives.empty())
        fail("system.drives", "the piecewise solver requires at least one drive");
    if (s.solver != SolverKind::piecewise && !s.drives.empty())
        fail("system.drives", "drives are only consumed by the piecewise solver");

    if (s.solver == SolverKind::mcwf && !s.seed && !cli_seed)
        fail("seed", "mcwf scenarios require an explicit seed (config key or --seed)");

    if (s.points < 2) fail("times.points", "need at least 2 points");
    if (!(s.t1 > s.t0)) fail("times.t1", "must exceed t0");

    if (s.outputs.empty()) fail("outputs", "at least one output required");
    const std::set<std::string>* allowed = &kLindbladOutputs;
    if (s.solver == SolverKind::bloch_redfield) allowed = &kRedfieldOutputs;
    if (s.solver == SolverKind::pauli) allowed = &kPauliOutputs;
    if (s.solver == SolverKind::floquet) allowed = &kFloquetOutputs;
    for (std::size_t k = 0; k < s.outputs.size(); ++k) {
        const json& out = s.outputs[k];
        const std::string key = "outputs[" + std::to_string(k) + "]";
        if (!out.is_object() || !out.contains("kind") || !out.contains("path"))
            fail(key, "needs 'kind' and 'path'");
        const std::string kind = out["kind"].get<std::string>();
        if (!allowed->count(kind))
            fail(key + ".kind", "output '" + kind + "' not available for this solver");
        if (out["path"].get<std::string>().empty()) fail(key + ".path", "empty path");
    }
}

json load_config(const std::string& name_or_path) {
    if (is_embedded(name_or_path)) return json::parse(embedded_config(name_or_path));
    std::ifstream in(name_or_path);
    if (!in)
        throw ConfigError("config file '" + name_or_path +
                          "' not found (and it is not an embedded scenario name)");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + name_or_path + "': " + e.what());
    }
    return j;
}

std::string library_version() { return "0.1.0"; }

} // namespace qme::scenario
