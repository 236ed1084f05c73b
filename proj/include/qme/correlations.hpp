// correlations.hpp — Two-time correlation functions from the master equation
// (the equations of motion of averages carry over to correlations) and
// emission/absorption spectra from their one-sided Fourier transforms.

#pragma once

#include <vector>

#include "qme/liouville.hpp"
#include "qme/propagation.hpp"

namespace qme::corr {

// Samples of <A(tau) B(0)> on a uniform tau grid.
struct CorrelationSeries {
    double tau0 = 0.0;
    double dtau = 0.0;
    std::vector<cplx> values;

    std::vector<double> taus() const;
};

struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> values;
    // Set when |c(tau_max)| >= 1e-4 |c(0)|: the series was too short for the
    // one-sided transform to have decayed.
    bool truncation_warning = false;
};

// c(tau) = Tr[A Lambda(tau)[B rho(t)]] with rho(t) = exp(L t)[rho_init];
// the operator B rho(t) is propagated with the semigroup machinery.
CorrelationSeries two_time_correlation(const Liouvillian& l, const DensityOperator& rho_init,
                                       const CMatrix& a, const CMatrix& b, double t,
                                       const prop::TimeGrid& taus);

// Same with rho(t) replaced by the unique steady state (null space must be
// one-dimensional, else NonUniqueSteadyState).
CorrelationSeries steady_correlation(const Liouvillian& l, const CMatrix& a, const CMatrix& b,
                                     const prop::TimeGrid& taus);

// E(omega) = 2 Re[ sum_j c(tau_j) e^{-i omega tau_j} dtau ] with trapezoid
// end weights; direct transform so any omega grid is accepted.
Spectrum emission_spectrum(const CorrelationSeries& series, const std::vector<double>& omegas);

// A(nu) = Re int_0^inf dtau e^{+i nu tau} <[sigma_plus^dag(tau), sigma_plus(0)]>_ss,
// assembled from the two operator orderings of the commutator.
Spectrum absorption_spectrum(const Liouvillian& l, const CMatrix& sigma_plus,
                             const prop::TimeGrid& taus, const std::vector<double>& nus);

// Multi-level emission: sum over transitions of the transform of
// <J_ij^dag(tau) J_ij(0)> with J_ij = sqrt(rate) op.
Spectrum multilevel_emission(const Liouvillian& l, const std::vector<LindbladChannel>& jumps,
                             const prop::TimeGrid& taus, const std::vector<double>& omegas);

// Default series horizon 20 / (spectral gap of L), gap = min |Re lambda| over
// the non-stationary modes.
double default_tau_horizon(const Liouvillian& l);

// Unique steady state of l as a proper density operator.
DensityOperator unique_steady_state(const Liouvillian& l);

} // namespace qme::corr
