// Scenario execution: solver dispatch, CSV/JSON artifact writing, the run
// manifest, and the per-scenario --check predicates.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qme/correlations.hpp"
#include "qme/linalg.hpp"
#include "qme/mcwf.hpp"
#include "qme/operators.hpp"
#include "qme/propagation.hpp"
#include "qme/scenario.hpp"

namespace qme::scenario {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct CsvFile {
    std::ofstream out;
    explicit CsvFile(const fs::path& path, const std::vector<std::string>& header) {
        out.open(path);
        if (!out) throw Error("cannot open output file " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? ", " : "") << header[i];
        out << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out << (i ? ", " : "") << fmt17(values[i]);
        out << "\n";
    }
};

CMatrix named_operator(const json& j, std::size_t d, const std::string& key) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (d != 2)
            throw ConfigError("config key '" + key +
                              "': named operators are two-level only");
        if (name == "sigma_x") return ops::sigma_x();
        if (name == "sigma_y") return ops::sigma_y();
        if (name == "sigma_z") return ops::sigma_z();
        if (name == "sigma_plus") return ops::ketbra(2, 1, 0);  // |e><g|, index 0 = g
        if (name == "sigma_minus") return ops::ketbra(2, 0, 1); // |g><e|
        throw ConfigError("config key '" + key + "': unknown operator '" + name + "'");
    }
    if (!j.is_array())
        throw ConfigError("config key '" + key + "': operator must be a matrix or name");
    CMatrix m(j.size(), j.empty() ? 0 : j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::size_t c = 0; c < j[i].size(); ++c) {
            const json& e = j[i][c];
            if (e.is_number()) m(i, c) = cplx{e.get<double>(), 0.0};
            else m(i, c) = cplx{e[0].get<double>(), e[1].get<double>()};
        }
    if (m.rows() != d || m.cols() != d)
        throw ConfigError("config key '" + key + "': operator dimension mismatch");
    return m;
}

// ----------------------------- initial states ------------------------------

DensityOperator initial_density(const Scenario& s, const redfield::EigenFrame* frame) {
    const std::size_t d = s.dimension;
    const json& init = s.initial_state;
    if (init.is_null())
        throw ConfigError("config key 'initial_state': required for this solver");
    const std::string kind = init.value("kind", std::string());
    if (kind == "basis" || kind == "eigenstate") {
        const auto idx = init.value("index", 0u);
        if (idx >= d) throw ConfigError("config key 'initial_state.index': out of range");
        CMatrix m(d, d);
        m(idx, idx) = 1.0;
        if (kind == "basis" && frame) {
            // site-basis projector expressed in the eigenbasis
            const CMatrix& u = frame->vectors;
            CMatrix proj(d, d);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    proj(a, b) = std::conj(u(idx, a)) * u(idx, b);
            return DensityOperator(std::move(proj));
        }
        if (kind == "eigenstate" && !frame) {
            throw ConfigError(
                "config key 'initial_state.kind': eigenstate requires a couplings system");
        }
        return DensityOperator(std::move(m));
    }
    if (kind == "maximally_mixed") return DensityOperator::maximally_mixed(d);
    if (kind == "vector") {
        if (!init.contains("amplitudes"))
            throw ConfigError("config key 'initial_state.amplitudes': missing");
        CVector v(init["amplitudes"].size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = init["amplitudes"][i];
            v[i] = e.is_number() ? cplx{e.get<double>(), 0.0}
                                 : cplx{e[0].get<double>(), e[1].get<double>()};
        }
        if (v.size() != d)
            throw ConfigError("config key 'initial_state.amplitudes': length mismatch");
        return DensityOperator::from_pure(PureState(std::move(v)));
    }
    if (kind == "matrix") {
        if (!init.contains("rho")) throw ConfigError("config key 'initial_state.rho': missing");
        CMatrix m = named_operator(init["rho"], d, "initial_state.rho");
        return DensityOperator::checked(std::move(m));
    }
    throw ConfigError("config key 'initial_state.kind': unknown kind '" + kind + "'");
}

PureState initial_pure(const Scenario& s) {
    const json& init = s.initial_state;
    if (init.is_null()) throw ConfigError("config key 'initial_state': required for mcwf");
    const std::string kind = init.value("kind", std::string());
    if (kind == "basis")
        return PureState::basis_state(s.dimension, init.value("index", 0u));
    if (kind == "vector") {
        CVector v(init["amplitudes"].size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = init["amplitudes"][i];
            v[i] = e.is_number() ? cplx{e.get<double>(), 0.0}
                                 : cplx{e[0].get<double>(), e[1].get<double>()};
        }
        return PureState(std::move(v), /*renormalize=*/true);
    }
    throw ConfigError("config key 'initial_state.kind': mcwf needs 'basis' or 'vector'");
}

// ------------------------------ run products -------------------------------

struct Products {
    std::vector<double> times;
    std::vector<CMatrix> states; // density matrices along the trajectory
    std::optional<Liouvillian> liou;
    std::optional<redfield::EigenFrame> frame; // set for couplings systems
    std::optional<DensityOperator> rho0;
    std::optional<mcwf::EnsembleResult> ensemble;
    std::vector<CMatrix> ensemble_observables; // matrices matching ensemble stats
    std::uint64_t effective_seed = 0;
    bool seeded = false;
};

prop::TimeGrid grid_of(const Scenario& s) {
    return prop::TimeGrid::span(s.t0, s.t1, s.points);
}

std::vector<CMatrix> states_of(const prop::Trajectory& traj) {
    std::vector<CMatrix> out;
    out.reserve(traj.size());
    for (const auto& pt : traj) out.push_back(pt.state.matrix());
    return out;
}

Liouvillian hamiltonian_part(const CMatrix& h) {
    return build_liouvillian(h, {});
}

Liouvillian dissipator_part(const CMatrix& h, const std::vector<LindbladChannel>& channels) {
    CMatrix zero(h.rows(), h.cols());
    return build_liouvillian(zero, channels);
}

prop::TimeDependentGenerator generator_of(const Scenario& s) {
    prop::TimeDependentGenerator g;
    g.static_part = build_liouvillian(s.hamiltonian, s.channels);
    for (const auto& d : s.drives) {
        const Liouvillian part = hamiltonian_part(d.hamiltonian);
        const double amp = d.amplitude;
        const double w = d.omega;
        if (d.waveform == "cos")
            g.driven_parts.emplace_back(part, [amp, w](double t) { return amp * std::cos(w * t); });
        else
            g.driven_parts.emplace_back(part, [amp, w](double t) { return amp * std::sin(w * t); });
    }
    return g;
}

Products execute(const Scenario& s, const RunOptions& opts) {
    Products p;
    const auto grid = grid_of(s);
    p.times = grid.times();

    if (s.seed || opts.seed) {
        p.seeded = true;
        p.effective_seed = opts.seed ? *opts.seed : *s.seed;
    }

    switch (s.solver) {
        case SolverKind::expm: {
            p.liou = build_liouvillian(s.hamiltonian, s.channels);
            p.rho0 = initial_density(s, nullptr);
            for (const double t : p.times)
                p.states.push_back(
                    prop::propagate_expm(*p.liou, *p.rho0, t - s.t0).matrix());
            break;
        }
        case SolverKind::spectral: {
            p.liou = build_liouvillian(s.hamiltonian, s.channels);
            p.rho0 = initial_density(s, nullptr);
            std::vector<double> rel(p.times.size());
            for (std::size_t k = 0; k < rel.size(); ++k) rel[k] = p.times[k] - s.t0;
            for (const auto& st : prop::spectral_solution(*p.liou, *p.rho0, rel))
                p.states.push_back(st.matrix());
            break;
        }
        case SolverKind::semigroup: {
            p.liou = build_liouvillian(s.hamiltonian, s.channels);
            p.rho0 = initial_density(s, nullptr);
            p.states = states_of(prop::semigroup_propagate(*p.liou, *p.rho0, grid));
            break;
        }
        case SolverKind::trotter: {
            p.liou = build_liouvillian(s.hamiltonian, s.channels);
            p.rho0 = initial_density(s, nullptr);
            const auto sub = s.solver_options.value("substeps", 1u);
            const bool corr = s.solver_options.value("correction", false);
            const Liouvillian l1 = hamiltonian_part(s.hamiltonian);
            const Liouvillian l2 = dissipator_part(s.hamiltonian, s.channels);
            DensityOperator rho = *p.rho0;
            p.states.push_back(rho.matrix());
            for (std::size_t k = 0; k < grid.steps; ++k) {
                rho = prop::trotter_propagate(l1, l2, rho, grid.dt, sub, corr);
                p.states.push_back(rho.matrix());
            }
            break;
        }
        case SolverKind::rk45: {
            p.liou = build_liouvillian(s.hamiltonian, s.channels);
            p.rho0 = initial_density(s, nullptr);
            prop::Rk45Options ropts;
            ropts.rtol = s.solver_options.value("rtol", 1e-8);
            ropts.atol = s.solver_options.value("atol", 1e-10);
            p.states = states_of(prop::rk45_propagate(*p.liou, *p.rho0, grid, ropts));
            break;
        }
        case SolverKind::piecewise: {
            const auto g = generator_of(s);
            p.liou = g.static_part;
            p.rho0 = initial_density(s, nullptr);
            if (prop::piecewise_step_size_indicator(g, grid) > 0.1)
                std::fprintf(stderr,
                             "warning: piecewise step dt*||L|| exceeds 0.1; "
                             "consider more time points\n");
            p.states = states_of(prop::propagate_piecewise(g, *p.rho0, grid));
            break;
        }
        case SolverKind::mcwf: {
            if (!p.seeded)
                throw ConfigError("config key 'seed': mcwf requires a seed");
            mcwf::TrajectoryConfig cfg;
            cfg.hamiltonian = s.hamiltonian;
            cfg.channels = s.channels;
            cfg.dt = grid.dt;
            cfg.n_steps = grid.steps;
            cfg.seed = p.effective_seed;
            cfg.n_trajectories = s.solver_options.value("trajectories", 0u);
            if (cfg.n_trajectories == 0)
                throw ConfigError("config key 'solver.trajectories': required for mcwf");
            cfg.n_threads = s.solver_options.value("threads", 0u);
            if (mcwf::step_size_indicator(cfg) > 0.1)
                std::fprintf(stderr, "warning: mcwf step dt*||H_eff|| exceeds 0.1\n");
            // collect observables requested by expectation outputs
            for (const auto& out : s.outputs)
                if (out.value("kind", std::string()) == "expectation")
                    p.ensemble_observables.push_back(
                        named_operator(out.at("observable"), s.dimension, "outputs.observable"));
            p.ensemble =
                mcwf::ensemble_average(cfg, initial_pure(s), p.ensemble_observables);
            for (std::size_t k = 0; k < p.ensemble->mean_state.size(); ++k)
                p.states.push_back(p.ensemble->mean_state[k]);
            p.liou = build_liouvillian(s.hamiltonian, s.channels); // for checks
            break;
        }
        case SolverKind::bloch_redfield: {
            p.frame = redfield::eigenframe(s.hamiltonian);
            std::optional<double> cutoff;
            if (s.solver_options.contains("secular_cutoff"))
                cutoff = s.solver_options["secular_cutoff"].get<double>();
            p.liou = redfield::bloch_redfield_tensor(s.hamiltonian, s.couplings, true, cutoff);
            p.rho0 = initial_density(s, &*p.frame);
            p.states = states_of(prop::semigroup_propagate(*p.liou, *p.rho0, grid));
            break;
        }
        case SolverKind::pauli: {
            p.frame = redfield::eigenframe(s.hamiltonian);
            const CMatrix w = redfield::pauli_rates(s.hamiltonian, s.couplings);
            const DensityOperator rho0 = initial_density(s, &*p.frame);
            std::vector<double> p0(s.dimension);
            for (std::size_t i = 0; i < s.dimension; ++i)
                p0[i] = rho0.matrix()(i, i).real();
            std::vector<double> rel(p.times.size());
            for (std::size_t k = 0; k < rel.size(); ++k) rel[k] = p.times[k] - s.t0;
            for (const auto& row : redfield::pauli_propagate(w, p0, rel)) {
                CMatrix m(s.dimension, s.dimension);
                for (std::size_t i = 0; i < s.dimension; ++i) m(i, i) = row[i];
                p.states.push_back(std::move(m));
            }
            break;
        }
        case SolverKind::floquet:
            // products are computed lazily by the floquet output writers
            break;
    }
    return p;
}

// ------------------------------- outputs -----------------------------------

std::vector<double> sweep_grid(const json& solver_options) {
    const json& sw = solver_options.at("sweep");
    const double lo = sw.at("omega_min").get<double>();
    const double hi = sw.at("omega_max").get<double>();
    const std::size_t n = sw.at("points").get<std::size_t>();
    if (n < 2 || !(hi > lo)) throw ConfigError("config key 'solver.sweep': bad grid");
    std::vector<double> ws(n);
    for (std::size_t k = 0; k < n; ++k)
        ws[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return ws;
}

void write_trajectory_output(const Scenario& s, const Products& p, const json& out,
                             const fs::path& path) {
    const std::string kind = out["kind"].get<std::string>();
    const std::size_t d = s.dimension;
    if (kind == "populations" || kind == "coherences" || kind == "state") {
        std::vector<std::string> header{"t"};
        const bool pops = kind != "coherences";
        const bool cohs = kind != "populations";
        if (pops)
            for (std::size_t i = 0; i < d; ++i) header.push_back("p_" + std::to_string(i));
        if (cohs) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i + 1; j < d; ++j)
                    header.push_back("re_rho_" + std::to_string(i) + std::to_string(j));
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i + 1; j < d; ++j)
                    header.push_back("im_rho_" + std::to_string(i) + std::to_string(j));
        }
        CsvFile csv(path, header);
        for (std::size_t k = 0; k < p.times.size(); ++k) {
            std::vector<double> row{p.times[k]};
            if (pops)
                for (std::size_t i = 0; i < d; ++i) row.push_back(p.states[k](i, i).real());
            if (cohs) {
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = i + 1; j < d; ++j)
                        row.push_back(p.states[k](i, j).real());
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = i + 1; j < d; ++j)
                        row.push_back(p.states[k](i, j).imag());
            }
            csv.row(row);
        }
        return;
    }
    if (kind == "purity") {
        CsvFile csv(path, {"t", "purity"});
        for (std::size_t k = 0; k < p.times.size(); ++k)
            csv.row({p.times[k], purity(DensityOperator(p.states[k]))});
        return;
    }
    if (kind == "expectation") {
        const CMatrix obs = named_operator(out.at("observable"), d, "outputs.observable");
        if (p.ensemble) {
            // locate the matching precomputed observable
            std::size_t idx = 0;
            for (; idx < p.ensemble_observables.size(); ++idx)
                if ((p.ensemble_observables[idx] - obs).frobenius_norm() == 0.0) break;
            const auto& stats = p.ensemble->observables.at(idx);
            CsvFile csv(path, {"t", "value", "std_err"});
            for (std::size_t k = 0; k < p.times.size(); ++k)
                csv.row({p.times[k], stats.mean[k], stats.std_err[k]});
            return;
        }
        CsvFile csv(path, {"t", "re", "im"});
        for (std::size_t k = 0; k < p.times.size(); ++k) {
            const cplx e = expectation(DensityOperator(p.states[k]), obs);
            csv.row({p.times[k], e.real(), e.imag()});
        }
        return;
    }
    if (kind == "bell_purity_sweep") {
        const std::size_t n = out.value("points", 201u);
        CsvFile csv(path, {"theta", "purity"});
        for (std::size_t k = 0; k < n; ++k) {
            const double theta =
                0.5 * M_PI * static_cast<double>(k) / static_cast<double>(n - 1);
            CVector v(4, cplx{0.0, 0.0});
            v[0] = std::cos(theta);
            v[3] = std::sin(theta);
            const DensityOperator joint = DensityOperator::from_pure(PureState(v, true));
            csv.row({theta, purity(partial_trace(joint, 2, 2, 1))});
        }
        return;
    }
    if (kind == "correlation" || kind == "spectrum") {
        const CMatrix a = named_operator(out.at("a"), d, "outputs.a");
        const CMatrix b = named_operator(out.at("b"), d, "outputs.b");
        const double tau_max = out.value("tau_max", 0.0) > 0.0
                                   ? out["tau_max"].get<double>()
                                   : corr::default_tau_horizon(*p.liou);
        const std::size_t tau_points = out.value("tau_points", 2001u);
        const auto taus = prop::TimeGrid::span(0.0, tau_max, tau_points);
        const auto series = corr::steady_correlation(*p.liou, a, b, taus);
        if (kind == "correlation") {
            CsvFile csv(path, {"tau", "re", "im"});
            const auto ts = series.taus();
            for (std::size_t k = 0; k < ts.size(); ++k)
                csv.row({ts[k], series.values[k].real(), series.values[k].imag()});
            return;
        }
        const double w_lo = out.at("omega_min").get<double>();
        const double w_hi = out.at("omega_max").get<double>();
        const std::size_t w_n = out.value("omega_points", 801u);
        std::vector<double> ws(w_n);
        for (std::size_t k = 0; k < w_n; ++k)
            ws[k] = w_lo + (w_hi - w_lo) * static_cast<double>(k) / static_cast<double>(w_n - 1);
        const auto spec = corr::emission_spectrum(series, ws);
        if (spec.truncation_warning)
            std::fprintf(stderr, "warning: correlation series not decayed at tau_max\n");
        CsvFile csv(path, {"omega", "value"});
        for (std::size_t k = 0; k < ws.size(); ++k) csv.row({ws[k], spec.values[k]});
        return;
    }
    if (kind == "pauli_populations") {
        const CMatrix w = redfield::pauli_rates(s.hamiltonian, s.couplings);
        const DensityOperator rho0 = initial_density(s, &*p.frame);
        std::vector<double> p0(d);
        for (std::size_t i = 0; i < d; ++i) p0[i] = rho0.matrix()(i, i).real();
        std::vector<double> rel(p.times.size());
        for (std::size_t k = 0; k < rel.size(); ++k) rel[k] = p.times[k] - s.t0;
        const auto rows = redfield::pauli_propagate(w, p0, rel);
        std::vector<std::string> header{"t"};
        for (std::size_t i = 0; i < d; ++i) header.push_back("p_" + std::to_string(i));
        CsvFile csv(path, header);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            std::vector<double> row{p.times[k]};
            row.insert(row.end(), rows[k].begin(), rows[k].end());
            csv.row(row);
        }
        return;
    }
    throw ConfigError("outputs: unhandled kind '" + kind + "'");
}

void write_floquet_output(const Scenario& s, const json& out, const fs::path& path) {
    const auto& problem = *s.floquet_problem;
    const std::string kind = out["kind"].get<std::string>();
    const bool sweeping = s.solver_options.contains("sweep");
    if (kind == "quasi_energies") {
        if (sweeping) {
            const auto ws = sweep_grid(s.solver_options);
            std::vector<std::string> header{"omega"};
            for (std::size_t i = 0; i < s.dimension; ++i)
                header.push_back("eps_" + std::to_string(i));
            CsvFile csv(path, header);
            for (const double w : ws) {
                floquet::FloquetProblem q = problem;
                q.omega = w;
                const auto sol = floquet::quasi_energies_hf(q);
                std::vector<double> row{w};
                row.insert(row.end(), sol.quasi_energies.begin(), sol.quasi_energies.end());
                csv.row(row);
            }
            return;
        }
        const auto sol = floquet::quasi_energies_hf(problem);
        CsvFile csv(path, {"index", "quasi_energy"});
        for (std::size_t k = 0; k < sol.quasi_energies.size(); ++k)
            csv.row({static_cast<double>(k), sol.quasi_energies[k]});
        return;
    }
    if (kind == "transition_probability") {
        const auto alpha = out.value("alpha", 0u);
        const auto beta = out.value("beta", 1u);
        const bool time_averaged = out.value("time_averaged", true);
        if (sweeping) {
            if (!time_averaged)
                throw ConfigError("outputs: sweep requires time_averaged probabilities");
            const auto ws = sweep_grid(s.solver_options);
            CsvFile csv(path, {"omega", "p_avg"});
            for (const double w : ws) {
                floquet::FloquetProblem q = problem;
                q.omega = w;
                csv.row({w, floquet::time_averaged_probability(q, alpha, beta)});
            }
            return;
        }
        if (time_averaged) {
            CsvFile csv(path, {"omega", "p_avg"});
            csv.row({problem.omega,
                     floquet::time_averaged_probability(problem, alpha, beta)});
            return;
        }
        CsvFile csv(path, {"t", "p"});
        const auto grid = grid_of(s);
        for (const double t : grid.times())
            csv.row({t, floquet::transition_probability(problem, alpha, beta, t)});
        return;
    }
    throw ConfigError("outputs: unhandled floquet kind '" + kind + "'");
}

// -------------------------------- checks -----------------------------------

struct CheckResult {
    bool passed = true;
    std::string message = "no check requested";
};

struct PeakFinder {
    // indices of strict interior local maxima above the floor
    static std::vector<std::size_t> maxima(const std::vector<double>& y, double floor) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 1; i + 1 < y.size(); ++i)
            if (y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > floor) idx.push_back(i);
        return idx;
    }
};

CheckResult run_check(const Scenario& s, const Products& p, const RunOptions& opts);

// ---------------------------------------------------------------------------

} // namespace

RunReport run(const json& config, const RunOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();
    Scenario s = parse(config);
    validate(s, opts.seed);

    const fs::path out_dir(opts.out_dir);
    fs::create_directories(out_dir);

    Products p = execute(s, opts);

    RunReport report;
    for (const auto& out : s.outputs) {
        const fs::path path = out_dir / out["path"].get<std::string>();
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        if (s.solver == SolverKind::floquet)
            write_floquet_output(s, out, path);
        else
            write_trajectory_output(s, p, out, path);
        report.outputs_written.push_back(path.string());
    }

    if (opts.check) {
        const CheckResult res = run_check(s, p, opts);
        report.check_passed = res.passed;
        report.check_message = res.message;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    json manifest;
    manifest["scenario"] = s.name;
    char hash_buf[20];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    manifest["scenario_hash"] = std::string("fnv1a64:") + hash_buf;
    if (p.seeded) manifest["seed"] = p.effective_seed;
    manifest["solver"] = s.solver_options;
    manifest["library_version"] = library_version();
    manifest["wall_time_seconds"] = wall;
    manifest["outputs"] = report.outputs_written;
    if (opts.check) {
        manifest["check_passed"] = report.check_passed;
        manifest["check_message"] = report.check_message;
    }
    const fs::path manifest_path = out_dir / (s.name + "_manifest.json");
    std::ofstream mf(manifest_path);
    if (!mf) throw Error("cannot open manifest file " + manifest_path.string());
    mf << manifest.dump(2) << "\n";
    report.manifest_path = manifest_path.string();
    return report;
}

// ------------------------------ check bodies -------------------------------

namespace {

CheckResult check_final_populations(const Scenario&, const Products& p, const json& c) {
    const auto expected = c.at("values").get<std::vector<double>>();
    const double tol = c.value("tol", 1e-8);
    const CMatrix& last = p.states.back();
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double got = last(i, i).real();
        if (std::abs(got - expected[i]) > tol)
            return {false, "final population " + std::to_string(i) + " = " + fmt17(got) +
                               ", expected " + fmt17(expected[i])};
    }
    return {true, "final populations match"};
}

CheckResult check_cptp(const Scenario&, const Products& p, const json& c) {
    const double trace_tol = c.value("trace_tol", 1e-8);
    const double herm_tol = c.value("herm_tol", 1e-8);
    const double eig_floor = c.value("eig_floor", -1e-7);
    for (std::size_t k = 0; k < p.states.size(); ++k) {
        const StateScore sc = state_score(p.states[k]);
        if (sc.trace_dev > trace_tol)
            return {false, "trace deviation " + fmt17(sc.trace_dev) + " at t index " +
                               std::to_string(k)};
        if (sc.herm_dev > herm_tol)
            return {false, "hermiticity defect " + fmt17(sc.herm_dev) + " at t index " +
                               std::to_string(k)};
        if (-sc.pos_dev < eig_floor)
            return {false, "eigenvalue " + fmt17(-sc.pos_dev) + " below floor at t index " +
                               std::to_string(k)};
    }
    return {true, "trace/hermiticity/positivity within tolerance at all times"};
}

CheckResult check_cross_method(const Scenario& s, const Products& p, const json& c) {
    const std::string reference = c.value("reference", std::string("rk45"));
    const double tol = c.value("tol", 1e-7);
    const auto grid = prop::TimeGrid::span(s.t0, s.t1, s.points);
    std::vector<CMatrix> ref;
    if (reference == "rk45") {
        prop::Rk45Options ropts;
        ropts.rtol = 1e-10;
        ropts.atol = 1e-12;
        for (const auto& pt : prop::rk45_propagate(*p.liou, *p.rho0, grid, ropts))
            ref.push_back(pt.state.matrix());
    } else if (reference == "expm") {
        for (const double t : p.times)
            ref.push_back(prop::propagate_expm(*p.liou, *p.rho0, t - s.t0).matrix());
    } else {
        return {false, "unknown reference solver '" + reference + "'"};
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < p.states.size(); ++k)
        for (std::size_t i = 0; i < s.dimension; ++i)
            worst = std::max(worst,
                             std::abs(p.states[k](i, i).real() - ref[k](i, i).real()));
    if (worst > tol)
        return {false, "max population deviation vs " + reference + " = " + fmt17(worst)};
    return {true, "max population deviation vs " + reference + " = " + fmt17(worst)};
}

CheckResult check_bell_purity(const Scenario&, const Products&, const json& c) {
    const double tol = c.value("tol", 1e-12);
    const std::size_t n = c.value("points", 201u);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 0.5 * M_PI * static_cast<double>(k) / static_cast<double>(n - 1);
        CVector v(4, cplx{0.0, 0.0});
        v[0] = std::cos(theta);
        v[3] = std::sin(theta);
        const DensityOperator joint = DensityOperator::from_pure(PureState(v, true));
        const double got = purity(partial_trace(joint, 2, 2, 1));
        const double want = std::pow(std::cos(theta), 4) + std::pow(std::sin(theta), 4);
        worst = std::max(worst, std::abs(got - want));
    }
    if (worst > tol) return {false, "purity sweep deviation " + fmt17(worst)};
    return {true, "purity sweep matches cos^4+sin^4, max deviation " + fmt17(worst)};
}

CheckResult check_semigroup_law(const Scenario& s, const Products& p, const json& c) {
    const double law_tol = c.value("law_tol", 1e-12);
    const double endpoint_tol = c.value("endpoint_tol", 1e-9);
    const auto grid = prop::TimeGrid::span(s.t0, s.t1, s.points);
    CMatrix ldt = p.liou->matrix();
    ldt *= cplx{grid.dt, 0.0};
    const CMatrix p1 = lin::expm(ldt);
    CMatrix l2dt = p.liou->matrix();
    l2dt *= cplx{2.0 * grid.dt, 0.0};
    const double law = (lin::expm(l2dt) - p1 * p1).max_abs();
    if (law > law_tol) return {false, "P(2dt) vs P(dt)^2 deviation " + fmt17(law)};
    const CMatrix endpoint =
        prop::propagate_expm(*p.liou, *p.rho0, grid.dt * double(grid.steps)).matrix();
    const double dev = (p.states.back() - endpoint).max_abs();
    if (dev > endpoint_tol) return {false, "endpoint vs expm deviation " + fmt17(dev)};
    return {true, "semigroup law " + fmt17(law) + ", endpoint deviation " + fmt17(dev)};
}

CheckResult check_trotter_convergence(const Scenario& s, const Products& p, const json& c) {
    const auto steps_list = c.value("steps_list", std::vector<std::size_t>{50, 100, 1000});
    const bool corr = s.solver_options.value("correction", false);
    const double t_span = s.t1 - s.t0;
    const Liouvillian l1 = hamiltonian_part(s.hamiltonian);
    const Liouvillian l2 = dissipator_part(s.hamiltonian, s.channels);
    const CMatrix exact = prop::propagate_expm(*p.liou, *p.rho0, t_span).matrix();
    double prev = 1e300;
    std::string detail;
    for (const std::size_t n : steps_list) {
        const double err =
            (prop::trotter_propagate(l1, l2, *p.rho0, t_span, n, corr).matrix() - exact)
                .frobenius_norm();
        detail += " n=" + std::to_string(n) + ":" + fmt17(err);
        if (err >= prev)
            return {false, "endpoint error did not decrease:" + detail};
        prev = err;
    }
    return {true, "endpoint error decreases monotonically:" + detail};
}

CheckResult check_mcwf_deviation(const Scenario& s, const Products& p, const json& c) {
    const double tol = c.value("tol", 0.05);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        const CMatrix exact =
            prop::propagate_expm(*p.liou, DensityOperator(p.states.front()),
                                 p.times[k] - s.t0)
                .matrix();
        for (std::size_t i = 0; i < s.dimension; ++i)
            worst = std::max(worst,
                             std::abs(p.states[k](i, i).real() - exact(i, i).real()));
    }
    if (worst > tol)
        return {false, "max population deviation vs exact " + fmt17(worst)};
    return {true, "max population deviation vs exact " + fmt17(worst)};
}

CheckResult check_spectrum_peak(const Scenario& s, const Products& p, const json& c) {
    // recompute the spectrum exactly as the output writer does
    json spec_out;
    for (const auto& out : s.outputs)
        if (out.value("kind", std::string()) == "spectrum") spec_out = out;
    if (spec_out.is_null()) return {false, "no spectrum output to check"};
    const CMatrix a = named_operator(spec_out.at("a"), s.dimension, "outputs.a");
    const CMatrix b = named_operator(spec_out.at("b"), s.dimension, "outputs.b");
    const double tau_max = spec_out.at("tau_max").get<double>();
    const auto taus = prop::TimeGrid::span(0.0, tau_max, spec_out.value("tau_points", 2001u));
    const auto series = corr::steady_correlation(*p.liou, a, b, taus);
    const double w_lo = spec_out.at("omega_min").get<double>();
    const double w_hi = spec_out.at("omega_max").get<double>();
    const std::size_t w_n = spec_out.value("omega_points", 801u);
    std::vector<double> ws(w_n);
    for (std::size_t k = 0; k < w_n; ++k)
        ws[k] = w_lo + (w_hi - w_lo) * static_cast<double>(k) / static_cast<double>(w_n - 1);
    const auto spec = corr::emission_spectrum(series, ws);
    const double dw = ws[1] - ws[0];

    const double peak_expected = c.at("peak").get<double>();
    const double fwhm_expected = c.at("fwhm").get<double>();
    std::size_t imax = 0;
    for (std::size_t k = 1; k < spec.values.size(); ++k)
        if (spec.values[k] > spec.values[imax]) imax = k;
    if (std::abs(ws[imax] - peak_expected) > dw + 1e-12)
        return {false, "peak at " + fmt17(ws[imax]) + ", expected " + fmt17(peak_expected)};
    // FWHM by linear interpolation at half maximum
    const double half = 0.5 * spec.values[imax];
    double left = ws.front(), right = ws.back();
    for (std::size_t k = imax; k-- > 0;)
        if (spec.values[k] < half) {
            const double f = (half - spec.values[k]) / (spec.values[k + 1] - spec.values[k]);
            left = ws[k] + f * dw;
            break;
        }
    for (std::size_t k = imax; k + 1 < spec.values.size(); ++k)
        if (spec.values[k + 1] < half) {
            const double f = (spec.values[k] - half) / (spec.values[k] - spec.values[k + 1]);
            right = ws[k] + f * dw;
            break;
        }
    const double fwhm = right - left;
    if (std::abs(fwhm - fwhm_expected) > dw + 1e-12)
        return {false, "FWHM " + fmt17(fwhm) + ", expected " + fmt17(fwhm_expected)};
    return {true, "peak " + fmt17(ws[imax]) + ", FWHM " + fmt17(fwhm)};
}

CheckResult check_pauli_br_agreement(const Scenario& s, const Products& p, const json& c) {
    const double tol = c.value("tol", 2e-2);
    const double simplex_tol = c.value("simplex_tol", 1e-9);
    const double eig_floor = c.value("eig_floor", -1e-6);
    const CMatrix w = redfield::pauli_rates(s.hamiltonian, s.couplings);
    std::vector<double> p0(s.dimension);
    for (std::size_t i = 0; i < s.dimension; ++i)
        p0[i] = p.states.front()(i, i).real();
    std::vector<double> rel(p.times.size());
    for (std::size_t k = 0; k < rel.size(); ++k) rel[k] = p.times[k] - s.t0;
    const auto pme = redfield::pauli_propagate(w, p0, rel);
    double worst = 0.0, min_eig = 0.0;
    for (std::size_t k = 0; k < p.states.size(); ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < s.dimension; ++i) {
            worst = std::max(worst, std::abs(p.states[k](i, i).real() - pme[k][i]));
            if (pme[k][i] < -simplex_tol)
                return {false, "Pauli probability negative: " + fmt17(pme[k][i])};
            sum += pme[k][i];
        }
        if (std::abs(sum - 1.0) > simplex_tol)
            return {false, "Pauli probabilities sum to " + fmt17(sum)};
        CMatrix herm = p.states[k] + p.states[k].adjoint();
        herm *= cplx{0.5, 0.0};
        min_eig = std::min(min_eig, lin::min_hermitian_eigenvalue(herm));
    }
    if (worst > tol) return {false, "max BR-Pauli population deviation " + fmt17(worst)};
    if (min_eig < eig_floor)
        return {false, "BR trajectory eigenvalue " + fmt17(min_eig) + " below floor"};
    return {true, "max BR-Pauli deviation " + fmt17(worst) + ", min eigenvalue " +
                      fmt17(min_eig)};
}

CheckResult check_floquet(const Scenario& s, const Products&, const json& c) {
    const auto& problem = *s.floquet_problem;
    const double dual_tol = c.value("dual_route_tol", 1e-7);
    // dual route at the base drive frequency
    const auto sol = floquet::quasi_energies_hf(problem);
    const auto from_prop = floquet::quasi_energies_propagator(problem);
    double dual = 0.0;
    for (std::size_t k = 0; k < sol.quasi_energies.size(); ++k) {
        double delta = std::abs(sol.quasi_energies[k] - from_prop[k]);
        delta = std::min(delta, std::abs(delta - problem.omega));
        dual = std::max(dual, delta);
    }
    if (dual > dual_tol)
        return {false, "dual-route quasi-energy deviation " + fmt17(dual)};

    // peak positions in the swept time-averaged probability
    const auto orders = c.value("peak_orders", std::vector<int>{1, 2});
    const auto ws = sweep_grid(s.solver_options);
    const double dw = ws[1] - ws[0];
    const auto alpha = c.value("alpha", 0u);
    const auto beta = c.value("beta", 1u);
    std::vector<double> pbar(ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) {
        floquet::FloquetProblem q = problem;
        q.omega = ws[k];
        pbar[k] = floquet::time_averaged_probability(q, alpha, beta);
    }
    const auto eig = lin::hermitian_eig(problem.h0);
    const double splitting = eig.eigenvalues.back() - eig.eigenvalues.front();
    const auto peaks = PeakFinder::maxima(pbar, 0.01);
    std::string detail = "dual-route dev " + fmt17(dual) + "; peaks at";
    for (const auto i : peaks) detail += " " + fmt17(ws[i]);
    for (const int n : orders) {
        const double predicted = splitting / static_cast<double>(n);
        bool found = false;
        for (const auto i : peaks)
            if (std::abs(ws[i] - predicted) <= dw + 1e-12) found = true;
        if (!found)
            return {false, "no local maximum within one grid step of " + fmt17(predicted) +
                               " (n=" + std::to_string(n) + ");" + detail};
    }
    return {true, detail};
}

CheckResult run_check(const Scenario& s, const Products& p, const RunOptions&) {
    if (s.check.is_null() || !s.check.contains("kind"))
        return {true, "no check requested"};
    const std::string kind = s.check["kind"].get<std::string>();
    if (kind == "final_populations") return check_final_populations(s, p, s.check);
    if (kind == "cptp") return check_cptp(s, p, s.check);
    if (kind == "cross_method") return check_cross_method(s, p, s.check);
    if (kind == "bell_purity") return check_bell_purity(s, p, s.check);
    if (kind == "semigroup_law") return check_semigroup_law(s, p, s.check);
    if (kind == "trotter_convergence") return check_trotter_convergence(s, p, s.check);
    if (kind == "mcwf_deviation") return check_mcwf_deviation(s, p, s.check);
    if (kind == "spectrum_peak") return check_spectrum_peak(s, p, s.check);
    if (kind == "pauli_br_agreement") return check_pauli_br_agreement(s, p, s.check);
    if (kind == "floquet") return check_floquet(s, p, s.check);
    return {false, "unknown check kind '" + kind + "'"};
}

} // namespace

} // namespace qme::scenario
