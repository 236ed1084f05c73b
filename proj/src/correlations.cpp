#include "qme/correlations.hpp"

#include <cmath>

#include "qme/linalg.hpp"

namespace qme::corr {

std::vector<double> CorrelationSeries::taus() const {
    std::vector<double> ts(values.size());
    for (std::size_t k = 0; k < ts.size(); ++k)
        ts[k] = tau0 + dtau * static_cast<double>(k);
    return ts;
}

namespace {

cplx product_trace(const CMatrix& a, const CMatrix& x) {
    // Tr[a x]
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t += a(i, j) * x(j, i);
    return t;
}

// c(tau_k) = Tr[a Lambda(tau_k)[x0]] over the grid.
CorrelationSeries correlation_from_operator(const Liouvillian& l, const CMatrix& a,
                                            const CMatrix& x0, const prop::TimeGrid& taus) {
    const auto evolved = prop::semigroup_propagate_operator(l, x0, taus);
    CorrelationSeries series;
    series.tau0 = taus.t0;
    series.dtau = taus.dt;
    series.values.reserve(evolved.size());
    for (const auto& x : evolved) series.values.push_back(product_trace(a, x));
    return series;
}

} // namespace

DensityOperator unique_steady_state(const Liouvillian& l) {
    const auto states = steady_states(l);
    if (states.size() != 1)
        throw NonUniqueSteadyState("steady correlation: null space dimension is " +
                                   std::to_string(states.size()) + ", need 1");
    CMatrix rho = states.front();
    return DensityOperator(std::move(rho));
}

CorrelationSeries two_time_correlation(const Liouvillian& l, const DensityOperator& rho_init,
                                       const CMatrix& a, const CMatrix& b, double t,
                                       const prop::TimeGrid& taus) {
    const std::size_t d = l.dim();
    if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d ||
        rho_init.dim() != d)
        throw DimensionMismatch("two_time_correlation: dimension mismatch");
    const DensityOperator rho_t =
        (t == 0.0) ? rho_init : prop::propagate_expm(l, rho_init, t);
    return correlation_from_operator(l, a, b * rho_t.matrix(), taus);
}

CorrelationSeries steady_correlation(const Liouvillian& l, const CMatrix& a, const CMatrix& b,
                                     const prop::TimeGrid& taus) {
    const std::size_t d = l.dim();
    if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
        throw DimensionMismatch("steady_correlation: dimension mismatch");
    const DensityOperator rho_ss = unique_steady_state(l);
    return correlation_from_operator(l, a, b * rho_ss.matrix(), taus);
}

namespace {

// One-sided transform sum_j w_j c_j e^{s i omega tau_j} dtau, s = +-1, with
// trapezoid end weights; the spectrum is twice the real part when doubled.
Spectrum one_sided_transform(const CorrelationSeries& series, const std::vector<double>& omegas,
                             double sign, double prefactor) {
    if (series.values.size() < 2)
        throw Error("spectrum: correlation series needs at least two samples");
    Spectrum s;
    s.omegas = omegas;
    s.values.resize(omegas.size());
    const std::size_t n = series.values.size();
    const auto taus = series.taus();
    const double c0 = std::abs(series.values.front());
    const double ctail = std::abs(series.values.back());
    s.truncation_warning = (c0 > 0.0) && (ctail >= 1e-4 * c0);
    for (std::size_t w = 0; w < omegas.size(); ++w) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double weight = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            acc += weight * series.values[j] *
                   std::exp(cplx{0.0, sign * omegas[w] * taus[j]});
        }
        s.values[w] = prefactor * (acc * series.dtau).real();
    }
    return s;
}

} // namespace

Spectrum emission_spectrum(const CorrelationSeries& series, const std::vector<double>& omegas) {
    return one_sided_transform(series, omegas, -1.0, 2.0);
}

Spectrum absorption_spectrum(const Liouvillian& l, const CMatrix& sigma_plus,
                             const prop::TimeGrid& taus, const std::vector<double>& nus) {
    const std::size_t d = l.dim();
    if (sigma_plus.rows() != d || sigma_plus.cols() != d)
        throw DimensionMismatch("absorption_spectrum: operator dimension mismatch");
    const DensityOperator rho_ss = unique_steady_state(l);
    const CMatrix lower = sigma_plus.adjoint();

    // <[sigma_plus^dag(tau), sigma_plus(0)]> =
    //   Tr[lower Lambda_tau[sigma_plus rho]] - Tr[lower Lambda_tau[rho sigma_plus]]
    const CorrelationSeries first =
        correlation_from_operator(l, lower, sigma_plus * rho_ss.matrix(), taus);
    const CorrelationSeries second =
        correlation_from_operator(l, lower, rho_ss.matrix() * sigma_plus, taus);
    CorrelationSeries commutator_series = first;
    for (std::size_t k = 0; k < commutator_series.values.size(); ++k)
        commutator_series.values[k] -= second.values[k];
    return one_sided_transform(commutator_series, nus, +1.0, 1.0);
}

Spectrum multilevel_emission(const Liouvillian& l, const std::vector<LindbladChannel>& jumps,
                             const prop::TimeGrid& taus, const std::vector<double>& omegas) {
    const DensityOperator rho_ss = unique_steady_state(l);
    Spectrum total;
    total.omegas = omegas;
    total.values.assign(omegas.size(), 0.0);
    for (const auto& jump : jumps) {
        if (jump.op.rows() != l.dim() || jump.op.cols() != l.dim())
            throw DimensionMismatch("multilevel_emission: jump dimension mismatch");
        CMatrix j_op = std::sqrt(jump.rate) * jump.op;
        const CorrelationSeries series =
            correlation_from_operator(l, j_op.adjoint(), j_op * rho_ss.matrix(), taus);
        const Spectrum part = emission_spectrum(series, omegas);
        for (std::size_t k = 0; k < total.values.size(); ++k)
            total.values[k] += part.values[k];
        total.truncation_warning = total.truncation_warning || part.truncation_warning;
    }
    return total;
}

double default_tau_horizon(const Liouvillian& l) {
    const auto eig = lin::bi_orthogonal_eig(l.matrix());
    double gap = 0.0;
    for (const cplx lam : eig.eigenvalues) {
        const double re = -lam.real();
        if (re > 1e-12 && (gap == 0.0 || re < gap)) gap = re;
    }
    if (gap == 0.0)
        throw Error("default_tau_horizon: generator has no decaying mode");
    return 20.0 / gap;
}

} // namespace qme::corr
