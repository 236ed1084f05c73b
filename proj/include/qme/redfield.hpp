// redfield.hpp — Microscopic relaxation pipeline: bath noise-power spectra,
// the relaxation tensor in the system eigenbasis, its Lindblad-form variant
// under a full secular grouping, and the Pauli rate-equation reduction.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qme/liouville.hpp"
#include "qme/matrix.hpp"

namespace qme::redfield {

// Ohmic form: S(w) = 2 pi eta w exp(-|w|/w_c) / (1 - exp(-beta w)),
// continuous at w = 0 with the limit 2 pi eta / beta.
double ohmic_spectrum(double eta, double omega_c, double beta, double omega);

class NoiseSpectrum {
public:
    static NoiseSpectrum ohmic(double eta, double omega_c, double beta);
    // Linear interpolation between (omega, value) samples; flat extrapolation.
    static NoiseSpectrum tabulated(std::vector<std::pair<double, double>> samples);
    static NoiseSpectrum custom(std::function<double(double)> fn);

    double operator()(double omega) const { return fn_(omega); }
    bool is_ohmic() const { return ohmic_; }
    double beta() const { return beta_; } // 0 when not Ohmic

private:
    NoiseSpectrum() = default;
    std::function<double(double)> fn_;
    bool ohmic_ = false;
    double beta_ = 0.0;
};

// Hermitian system coupling operator paired with its bath spectrum. Distinct
// couplings are treated as mutually uncorrelated.
struct CouplingSpec {
    CMatrix op;
    NoiseSpectrum spectrum;
};

struct EigenFrame {
    std::vector<double> energies; // ascending
    CMatrix vectors;              // unitary, eigenvectors as columns, phase-fixed
    double bohr(std::size_t a, std::size_t b) const { return energies[a] - energies[b]; }
    CMatrix to_eigenbasis(const CMatrix& op) const; // U^dag op U
};

EigenFrame eigenframe(const CMatrix& h); // throws NonHermitian

// Relaxation tensor R_abcd flattened to a d^2 x d^2 generator acting on the
// vectorized density operator in the eigenbasis of h (column stacking, same
// convention as build_liouvillian). include_unitary adds the coherent
// -i w_ab rotation on the diagonal. A finite secular_cutoff drops terms
// with |w_ab - w_cd| above it.
Liouvillian bloch_redfield_tensor(const CMatrix& h, const std::vector<CouplingSpec>& couplings,
                                  bool include_unitary = true,
                                  std::optional<double> secular_cutoff = std::nullopt);

struct LindbladForm {
    CMatrix hamiltonian;                 // diagonal, in the eigenbasis
    std::vector<LindbladChannel> channels; // one per (coupling, Bohr frequency)
    std::vector<double> frequencies;     // Bohr frequency of each channel
    bool merged_degenerate = false;      // distinct transitions shared a frequency
};

// Full secular grouping by Bohr frequency: channel operators
// A_alpha(w) = sum_{w = w_b - w_a} A_ab |a><b| with rate S_alpha(w).
LindbladForm br_lindblad_form(const CMatrix& h, const std::vector<CouplingSpec>& couplings);

// W_ab = sum_alpha A_ba A_ab S_alpha(w_ba): transition rate b -> a.
// Requires a non-degenerate spectrum (min spacing > 1e-9).
CMatrix pauli_rates(const CMatrix& h, const std::vector<CouplingSpec>& couplings);

// p(t) = exp(G t) p0 with G_ab = W_ab (a != b), G_aa = -sum_b W_ba.
std::vector<std::vector<double>> pauli_propagate(const CMatrix& w,
                                                 const std::vector<double>& p0,
                                                 const std::vector<double>& times);

// The Pauli generator itself (columns sum to zero).
CMatrix pauli_generator(const CMatrix& w);

} // namespace qme::redfield
