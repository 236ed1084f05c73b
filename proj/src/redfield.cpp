#include "qme/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qme/linalg.hpp"

namespace qme::redfield {

double ohmic_spectrum(double eta, double omega_c, double beta, double omega) {
    if (eta < 0.0) throw Error("ohmic_spectrum: eta must be non-negative");
    if (omega_c <= 0.0) throw Error("ohmic_spectrum: omega_c must be positive");
    if (beta <= 0.0) throw Error("ohmic_spectrum: beta must be positive");
    const double two_pi_eta = 2.0 * M_PI * eta;
    const double env = std::exp(-std::abs(omega) / omega_c);
    if (std::abs(beta * omega) < 1e-8) return two_pi_eta * env / beta;
    return two_pi_eta * omega * env / (1.0 - std::exp(-beta * omega));
}

NoiseSpectrum NoiseSpectrum::ohmic(double eta, double omega_c, double beta) {
    NoiseSpectrum s;
    s.fn_ = [eta, omega_c, beta](double w) { return ohmic_spectrum(eta, omega_c, beta, w); };
    s.ohmic_ = true;
    s.beta_ = beta;
    return s;
}

NoiseSpectrum NoiseSpectrum::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.empty()) throw Error("NoiseSpectrum::tabulated: no samples");
    std::sort(samples.begin(), samples.end());
    NoiseSpectrum s;
    s.fn_ = [samples = std::move(samples)](double w) {
        if (w <= samples.front().first) return samples.front().second;
        if (w >= samples.back().first) return samples.back().second;
        const auto hi = std::lower_bound(samples.begin(), samples.end(),
                                         std::make_pair(w, -1e300));
        const auto lo = hi - 1;
        const double f = (w - lo->first) / (hi->first - lo->first);
        return lo->second + f * (hi->second - lo->second);
    };
    return s;
}

NoiseSpectrum NoiseSpectrum::custom(std::function<double(double)> fn) {
    NoiseSpectrum s;
    s.fn_ = std::move(fn);
    return s;
}

CMatrix EigenFrame::to_eigenbasis(const CMatrix& op) const {
    return vectors.adjoint() * op * vectors;
}

EigenFrame eigenframe(const CMatrix& h) {
    if (!h.is_square()) throw NonSquare("eigenframe: Hamiltonian is not square");
    if (!h.is_hermitian(1e-10))
        throw NonHermitian("eigenframe: Hamiltonian is not Hermitian");
    const auto eig = lin::hermitian_eig(h);
    return EigenFrame{eig.eigenvalues, eig.vectors};
}

namespace {

void check_couplings(const CMatrix& h, const std::vector<CouplingSpec>& couplings) {
    for (std::size_t a = 0; a < couplings.size(); ++a) {
        if (!couplings[a].op.is_square() || couplings[a].op.rows() != h.rows())
            throw DimensionMismatch("redfield: coupling " + std::to_string(a) +
                                    " dimension mismatch");
        if (!couplings[a].op.is_hermitian(1e-10))
            throw NonHermitian("redfield: coupling " + std::to_string(a) +
                               " is not Hermitian");
    }
}

} // namespace

Liouvillian bloch_redfield_tensor(const CMatrix& h, const std::vector<CouplingSpec>& couplings,
                                  bool include_unitary,
                                  std::optional<double> secular_cutoff) {
    check_couplings(h, couplings);
    const EigenFrame frame = eigenframe(h);
    const std::size_t d = h.rows();
    const std::size_t m = couplings.size();

    // Coupling operators rotated into the eigenbasis, spectra sampled on the
    // Bohr grid: s[al](a,b) = S_al(w_a - w_b).
    std::vector<CMatrix> a_ops(m);
    std::vector<std::vector<double>> s_grid(m, std::vector<double>(d * d));
    for (std::size_t al = 0; al < m; ++al) {
        a_ops[al] = frame.to_eigenbasis(couplings[al].op);
        for (std::size_t x = 0; x < d; ++x)
            for (std::size_t y = 0; y < d; ++y)
                s_grid[al][x * d + y] = couplings[al].spectrum(frame.bohr(x, y));
    }

    CMatrix gen(d * d, d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            const std::size_t row = b * d + a; // vec index of rho_ab
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t e = 0; e < d; ++e) {
                    if (secular_cutoff &&
                        std::abs(frame.bohr(a, b) - frame.bohr(c, e)) > *secular_cutoff)
                        continue;
                    cplx val{0.0, 0.0};
                    for (std::size_t al = 0; al < m; ++al) {
                        const CMatrix& A = a_ops[al];
                        const auto& S = s_grid[al];
                        cplx term{0.0, 0.0};
                        if (b == e)
                            for (std::size_t n = 0; n < d; ++n)
                                term += A(a, n) * A(n, c) * S[c * d + n];
                        term -= A(a, c) * A(e, b) * S[c * d + a];
                        if (a == c)
                            for (std::size_t n = 0; n < d; ++n)
                                term += A(e, n) * A(n, b) * S[e * d + n];
                        term -= A(a, c) * A(e, b) * S[e * d + b];
                        val += term;
                    }
                    gen(row, e * d + c) += cplx{-0.5, 0.0} * val;
                }
            if (include_unitary)
                gen(row, row) += cplx{0.0, -frame.bohr(a, b)};
        }
    return Liouvillian(std::move(gen));
}

LindbladForm br_lindblad_form(const CMatrix& h, const std::vector<CouplingSpec>& couplings) {
    check_couplings(h, couplings);
    const EigenFrame frame = eigenframe(h);
    const std::size_t d = h.rows();

    LindbladForm out;
    out.hamiltonian = CMatrix(d, d);
    for (std::size_t a = 0; a < d; ++a) out.hamiltonian(a, a) = frame.energies[a];

    constexpr double kFreqTol = 1e-9;
    for (const auto& coupling : couplings) {
        const CMatrix A = frame.to_eigenbasis(coupling.op);
        // Group matrix elements by Bohr frequency w = w_b - w_a.
        struct Group {
            double freq;
            CMatrix op;
            std::vector<std::pair<std::size_t, std::size_t>> transitions;
        };
        std::vector<Group> groups;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                if (A(a, b) == cplx{0.0, 0.0}) continue;
                const double w = frame.bohr(b, a);
                auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
                    return std::abs(g.freq - w) <= kFreqTol;
                });
                if (it == groups.end()) {
                    groups.push_back({w, CMatrix(d, d), {}});
                    it = groups.end() - 1;
                }
                it->op(a, b) += A(a, b);
                if (std::find(it->transitions.begin(), it->transitions.end(),
                              std::pair<std::size_t, std::size_t>(a, b)) ==
                    it->transitions.end())
                    it->transitions.emplace_back(a, b);
            }
        for (auto& g : groups) {
            // The zero-frequency group legitimately collects every diagonal
            // element; anything else sharing a group means distinct
            // transitions were merged.
            const bool all_diagonal =
                std::all_of(g.transitions.begin(), g.transitions.end(),
                            [](const auto& t) { return t.first == t.second; });
            if (g.transitions.size() > 1 && !all_diagonal)
                out.merged_degenerate = true;
            const double rate = coupling.spectrum(g.freq);
            out.channels.push_back({std::move(g.op), rate});
            out.frequencies.push_back(g.freq);
        }
    }
    return out;
}

CMatrix pauli_rates(const CMatrix& h, const std::vector<CouplingSpec>& couplings) {
    check_couplings(h, couplings);
    const EigenFrame frame = eigenframe(h);
    const std::size_t d = h.rows();
    for (std::size_t a = 0; a + 1 < d; ++a)
        if (frame.energies[a + 1] - frame.energies[a] <= 1e-9)
            throw DegenerateSpectrum(
                "pauli_rates: eigenvalues closer than 1e-9; populations do not "
                "decouple from coherences");
    CMatrix w(d, d);
    for (const auto& coupling : couplings) {
        const CMatrix A = frame.to_eigenbasis(coupling.op);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                if (a == b) continue;
                const double rate =
                    (A(b, a) * A(a, b)).real() * coupling.spectrum(frame.bohr(b, a));
                w(a, b) += rate;
            }
    }
    return w;
}

CMatrix pauli_generator(const CMatrix& w) {
    if (!w.is_square()) throw NonSquare("pauli_generator: rate matrix is not square");
    const std::size_t d = w.rows();
    CMatrix g(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            if (a == b) continue;
            g(a, b) = w(a, b).real();
            g(b, b) -= w(a, b).real();
        }
    return g;
}

std::vector<std::vector<double>> pauli_propagate(const CMatrix& w,
                                                 const std::vector<double>& p0,
                                                 const std::vector<double>& times) {
    const std::size_t d = w.rows();
    if (p0.size() != d) throw DimensionMismatch("pauli_propagate: p0 size mismatch");
    double total = 0.0;
    for (const double p : p0) {
        if (p < 0.0) throw Error("pauli_propagate: negative initial probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw Error("pauli_propagate: initial probabilities do not sum to 1");

    const CMatrix g = pauli_generator(w);
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    CVector p0c(d);
    for (std::size_t i = 0; i < d; ++i) p0c[i] = p0[i];
    for (const double t : times) {
        CMatrix gt = g;
        gt *= cplx{t, 0.0};
        const CVector pt = lin::expm(gt) * p0c;
        std::vector<double> row(d);
        for (std::size_t i = 0; i < d; ++i) row[i] = pt[i].real();
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace qme::redfield
