// floquet.hpp — Periodically driven systems: rotating-frame reduction of a
// driven two-level system, truncated Floquet Hamiltonian, quasi-energies via
// two independent routes, and transition probabilities.

#pragma once

#include <vector>

#include "qme/matrix.hpp"

namespace qme::floquet {

// H(t) = h0 + e^{-i omega t} h_plus + e^{+i omega t} h_minus.
// Hermiticity of H(t) requires h_minus = h_plus^dag.
struct FloquetProblem {
    CMatrix h0;
    CMatrix h_plus;
    CMatrix h_minus;
    double omega = 0.0;
    int n_harmonics = 4; // truncation order N; blocks run n = -N..N

    void validate() const;
    std::size_t dim() const { return h0.rows(); }
    CMatrix hamiltonian_at(double t) const;
};

struct FloquetSolution {
    std::vector<double> quasi_energies;   // d values folded into (-w/2, w/2]
    std::vector<CMatrix> modes;           // per mode: d x (2N+1) Fourier blocks
    std::vector<double> hf_eigenvalues;   // full H_F spectrum
    CMatrix hf_eigenvectors;              // columns
    int n_harmonics = 0;                  // truncation the solution was computed at
};

// Rotating-frame two-level Hamiltonian 1/2 [[dw, 2 conj(rabi)], [2 rabi, -dw]]
// = (dw/2) sz + Re(rabi) sx + Im(rabi) sy.
CMatrix rwa_rotating_frame(double delta_omega, cplx rabi);

// Block-tridiagonal (2N+1)d matrix: diagonal h0 + n w, superdiagonal h_plus,
// subdiagonal h_minus, n ascending from -N.
CMatrix build_floquet_hamiltonian(const FloquetProblem& p);

// Initial drive phase phi0 (sin(w t + phi0) conventions) enters as a rotation
// of the +1 Fourier component: h_plus -> e^{-i phi0} h_plus.
CMatrix shift_drive_phase(const CMatrix& h_plus, double phi0);

// Fold into the first Brillouin zone (-w/2, w/2].
double fold_quasi_energy(double e, double omega);

// Diagonalize H_F with the truncation convergence protocol (start at
// max(n_harmonics, 4), step by 2 until the folded central-zone energies move
// by < 1e-6). Throws TruncationNotConverged past the internal cap.
FloquetSolution quasi_energies_hf(const FloquetProblem& p);

// Quasi-energies from the one-period propagator U(T;0): eigenphases
// -arg(eta)/T folded into the zone. Throws NonUnitaryPropagator when
// ||U^dag U - 1|| > 1e-8.
std::vector<double> quasi_energies_propagator(const FloquetProblem& p);

// P_{alpha->beta}(t) = sum_k |<beta k| exp(-i H_F t) |alpha 0>|^2, summed over
// every retained harmonic block; converged in the truncation order.
double transition_probability(const FloquetProblem& p, std::size_t alpha, std::size_t beta,
                              double t);

// Time average: sum_k sum_lambda |<beta k|lambda><lambda|alpha 0>|^2.
double time_averaged_probability(const FloquetProblem& p, std::size_t alpha, std::size_t beta);

} // namespace qme::floquet
