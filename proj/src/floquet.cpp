#include "qme/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qme/kernels.hpp"
#include "qme/linalg.hpp"
#include "qme/propagation.hpp"

namespace qme::floquet {

namespace {
constexpr int kMaxHarmonics = 64;
constexpr double kEnergyTol = 1e-6;
constexpr double kProbabilityTol = 1e-4;
} // namespace

void FloquetProblem::validate() const {
    if (!h0.is_square()) throw NonSquare("FloquetProblem: h0 is not square");
    const std::size_t d = h0.rows();
    if (h_plus.rows() != d || h_plus.cols() != d || h_minus.rows() != d ||
        h_minus.cols() != d)
        throw DimensionMismatch("FloquetProblem: harmonic blocks must match h0");
    if (omega <= 0.0) throw Error("FloquetProblem: omega must be positive");
    if (n_harmonics < 1) throw Error("FloquetProblem: n_harmonics must be >= 1");
    if ((h_minus - h_plus.adjoint()).frobenius_norm() > 1e-10)
        throw NonHermitian("FloquetProblem: h_minus != h_plus^dag, H(t) not Hermitian");
    if (!h0.is_hermitian(1e-10))
        throw NonHermitian("FloquetProblem: h0 is not Hermitian");
}

CMatrix FloquetProblem::hamiltonian_at(double t) const {
    const cplx em = std::exp(cplx{0.0, -omega * t});
    CMatrix h = h0;
    CMatrix plus = h_plus;
    plus *= em;
    CMatrix minus = h_minus;
    minus *= std::conj(em);
    h += plus;
    h += minus;
    return h;
}

CMatrix rwa_rotating_frame(double delta_omega, cplx rabi) {
    CMatrix h(2, 2);
    h(0, 0) = 0.5 * delta_omega;
    h(1, 1) = -0.5 * delta_omega;
    h(0, 1) = std::conj(rabi);
    h(1, 0) = rabi;
    return h;
}

CMatrix build_floquet_hamiltonian(const FloquetProblem& p) {
    p.validate();
    const std::size_t d = p.dim();
    const int n = p.n_harmonics;
    const std::size_t blocks = 2 * static_cast<std::size_t>(n) + 1;
    CMatrix hf(blocks * d, blocks * d);
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        const double nw = (static_cast<double>(bi) - n) * p.omega;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                hf(bi * d + i, bi * d + j) = p.h0(i, j);
            hf(bi * d + i, bi * d + i) += nw;
        }
        if (bi + 1 < blocks)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    hf(bi * d + i, (bi + 1) * d + j) = p.h_plus(i, j);
                    hf((bi + 1) * d + i, bi * d + j) = p.h_minus(i, j);
                }
    }
    return hf;
}

CMatrix shift_drive_phase(const CMatrix& h_plus, double phi0) {
    CMatrix out = h_plus;
    out *= std::exp(cplx{0.0, -phi0});
    return out;
}

double fold_quasi_energy(double e, double omega) {
    double f = e - omega * std::round(e / omega);
    if (f <= -0.5 * omega) f += omega;
    if (f > 0.5 * omega) f -= omega;
    return f;
}

namespace {

struct HfSolve {
    std::vector<double> eigenvalues;
    CMatrix eigenvectors;
    std::vector<std::size_t> selected; // d eigenpair indices, one per mode
};

// Diagonalize at fixed truncation and pick one eigenpair per physical mode:
// the eigenvalues inside the fundamental zone when exactly d fall there,
// otherwise the d eigenvectors with the largest central-block weight.
HfSolve solve_fixed(const FloquetProblem& p) {
    const std::size_t d = p.dim();
    const auto eig = lin::hermitian_eig(build_floquet_hamiltonian(p));
    HfSolve s{eig.eigenvalues, eig.vectors, {}};
    const std::size_t total = s.eigenvalues.size();
    for (std::size_t k = 0; k < total; ++k) {
        const double e = s.eigenvalues[k];
        if (e > -0.5 * p.omega && e <= 0.5 * p.omega) s.selected.push_back(k);
    }
    if (s.selected.size() != d) {
        const std::size_t n0 = static_cast<std::size_t>(p.n_harmonics) * d;
        std::vector<double> weight(total, 0.0);
        for (std::size_t k = 0; k < total; ++k)
            for (std::size_t i = 0; i < d; ++i)
                weight[k] += std::norm(s.eigenvectors(n0 + i, k));
        std::vector<std::size_t> order(total);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
        s.selected.assign(order.begin(), order.begin() + d);
        std::sort(s.selected.begin(), s.selected.end());
    }
    return s;
}

std::vector<double> folded_energies(const HfSolve& s, double omega) {
    std::vector<double> es;
    es.reserve(s.selected.size());
    for (const std::size_t k : s.selected) es.push_back(fold_quasi_energy(s.eigenvalues[k], omega));
    std::sort(es.begin(), es.end());
    return es;
}

// Worst-case distance between folded spectra, respecting the zone wraparound.
double folded_shift(const std::vector<double>& a, const std::vector<double>& b, double omega) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double delta = std::abs(a[i] - b[i]);
        delta = std::min(delta, std::abs(delta - omega));
        worst = std::max(worst, delta);
    }
    return worst;
}

FloquetSolution package(const FloquetProblem& p, const HfSolve& s) {
    const std::size_t d = p.dim();
    const std::size_t blocks = 2 * static_cast<std::size_t>(p.n_harmonics) + 1;
    FloquetSolution out;
    out.n_harmonics = p.n_harmonics;
    out.hf_eigenvalues = s.eigenvalues;
    out.hf_eigenvectors = s.eigenvectors;
    std::vector<std::pair<double, std::size_t>> folded;
    for (const std::size_t k : s.selected)
        folded.emplace_back(fold_quasi_energy(s.eigenvalues[k], p.omega), k);
    std::sort(folded.begin(), folded.end());
    for (const auto& [e, k] : folded) {
        out.quasi_energies.push_back(e);
        CMatrix mode(d, blocks);
        for (std::size_t bi = 0; bi < blocks; ++bi)
            for (std::size_t i = 0; i < d; ++i)
                mode(i, bi) = s.eigenvectors(bi * d + i, k);
        out.modes.push_back(std::move(mode));
    }
    return out;
}

FloquetProblem with_harmonics(const FloquetProblem& p, int n) {
    FloquetProblem q = p;
    q.n_harmonics = n;
    return q;
}

} // namespace

FloquetSolution quasi_energies_hf(const FloquetProblem& p) {
    p.validate();
    int n = std::max(p.n_harmonics, 4);
    FloquetProblem q = with_harmonics(p, n);
    HfSolve prev = solve_fixed(q);
    std::vector<double> prev_es = folded_energies(prev, p.omega);
    while (true) {
        const int n_next = n + 2;
        if (n_next > kMaxHarmonics)
            throw TruncationNotConverged(
                "quasi_energies_hf: central-zone quasi-energies still moving at "
                "the harmonic truncation cap");
        FloquetProblem q2 = with_harmonics(p, n_next);
        HfSolve cur = solve_fixed(q2);
        std::vector<double> cur_es = folded_energies(cur, p.omega);
        if (folded_shift(prev_es, cur_es, p.omega) < kEnergyTol)
            return package(q2, cur);
        n = n_next;
        prev = std::move(cur);
        prev_es = std::move(cur_es);
    }
}

std::vector<double> quasi_energies_propagator(const FloquetProblem& p) {
    p.validate();
    const std::size_t d = p.dim();
    const double period = 2.0 * M_PI / p.omega;

    // Integrate dU/dt = -i H(t) U over one period at tight tolerance.
    std::vector<double> y0(2 * d * d);
    {
        CMatrix id = CMatrix::identity(d);
        std::copy_n(reinterpret_cast<const double*>(id.data()), y0.size(), y0.data());
    }
    const prop::RealRhs rhs = [&](double t, const std::vector<double>& y,
                                  std::vector<double>& dy) {
        const CMatrix h = p.hamiltonian_at(t);
        const auto* u = reinterpret_cast<const cplx*>(y.data());
        auto* du = reinterpret_cast<cplx*>(dy.data());
        kernels::gemm(h.data(), u, du, d, d, d);
        kernels::scal(cplx{0.0, -1.0}, du, d * d);
    };
    prop::Rk45Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-12;
    const auto rows = prop::rk45_solve(rhs, y0, 0.0, period, {period}, opts);
    CMatrix u(d, d);
    std::copy_n(rows[0].data(), rows[0].size(), reinterpret_cast<double*>(u.data()));

    if ((u.adjoint() * u - CMatrix::identity(d)).frobenius_norm() > 1e-8)
        throw NonUnitaryPropagator(
            "quasi_energies_propagator: one-period propagator is not unitary");

    using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::ComplexEigenSolver<EMat> es(
        Eigen::Map<const EMat>(u.data(), static_cast<Eigen::Index>(d),
                               static_cast<Eigen::Index>(d)),
        false);
    std::vector<double> out;
    out.reserve(d);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const cplx eta = es.eigenvalues()(k);
        out.push_back(fold_quasi_energy(-std::arg(eta) / period, p.omega));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

double transition_probability_fixed(const HfSolve& s, std::size_t d, int n,
                                    std::size_t alpha, std::size_t beta, double t) {
    const std::size_t blocks = 2 * static_cast<std::size_t>(n) + 1;
    const std::size_t a0 = static_cast<std::size_t>(n) * d + alpha;
    // v = exp(-i H_F t)|alpha 0> = Q e^{-i lambda t} Q^dag e_{a0}
    const std::size_t total = blocks * d;
    CVector v(total, cplx{0.0, 0.0});
    for (std::size_t lam = 0; lam < total; ++lam) {
        const cplx amp =
            std::conj(s.eigenvectors(a0, lam)) * std::exp(cplx{0.0, -s.eigenvalues[lam] * t});
        for (std::size_t r = 0; r < total; ++r) v[r] += s.eigenvectors(r, lam) * amp;
    }
    double prob = 0.0;
    for (std::size_t k = 0; k < blocks; ++k) prob += std::norm(v[k * d + beta]);
    return prob;
}

double time_averaged_fixed(const HfSolve& s, std::size_t d, int n, std::size_t alpha,
                           std::size_t beta) {
    const std::size_t blocks = 2 * static_cast<std::size_t>(n) + 1;
    const std::size_t a0 = static_cast<std::size_t>(n) * d + alpha;
    const std::size_t total = blocks * d;
    double prob = 0.0;
    for (std::size_t lam = 0; lam < total; ++lam) {
        const double wa = std::norm(s.eigenvectors(a0, lam));
        if (wa == 0.0) continue;
        double wb = 0.0;
        for (std::size_t k = 0; k < blocks; ++k)
            wb += std::norm(s.eigenvectors(k * d + beta, lam));
        prob += wa * wb;
    }
    return prob;
}

// Run fn at increasing truncation until both the quasi-energies and the
// probability value settle.
template <typename Fn>
double converge_probability(const FloquetProblem& p, Fn&& fn) {
    p.validate();
    int n = std::max(p.n_harmonics, 4);
    FloquetProblem q = with_harmonics(p, n);
    HfSolve prev = solve_fixed(q);
    std::vector<double> prev_es = folded_energies(prev, p.omega);
    double prev_val = fn(prev, n);
    while (true) {
        const int n_next = n + 2;
        if (n_next > kMaxHarmonics)
            throw TruncationNotConverged(
                "floquet probability: value still moving at the harmonic truncation cap");
        FloquetProblem q2 = with_harmonics(p, n_next);
        HfSolve cur = solve_fixed(q2);
        std::vector<double> cur_es = folded_energies(cur, p.omega);
        const double val = fn(cur, n_next);
        if (folded_shift(prev_es, cur_es, p.omega) < kEnergyTol &&
            std::abs(val - prev_val) < kProbabilityTol)
            return val;
        n = n_next;
        prev = std::move(cur);
        prev_es = std::move(cur_es);
        prev_val = val;
    }
}

} // namespace

double transition_probability(const FloquetProblem& p, std::size_t alpha, std::size_t beta,
                              double t) {
    if (alpha >= p.dim() || beta >= p.dim())
        throw DimensionMismatch("transition_probability: state index out of range");
    return converge_probability(p, [&](const HfSolve& s, int n) {
        return transition_probability_fixed(s, p.dim(), n, alpha, beta, t);
    });
}

double time_averaged_probability(const FloquetProblem& p, std::size_t alpha,
                                 std::size_t beta) {
    if (alpha >= p.dim() || beta >= p.dim())
        throw DimensionMismatch("time_averaged_probability: state index out of range");
    return converge_probability(p, [&](const HfSolve& s, int n) {
        return time_averaged_fixed(s, p.dim(), n, alpha, beta);
    });
}

} // namespace qme::floquet
