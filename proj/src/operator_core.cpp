#include "qme/operator_core.hpp"

#include <cmath>
#include <utility>

#include "qme/kernels.hpp"
#include "qme/linalg.hpp"

namespace qme {

PureState::PureState(CVector amplitudes, bool renormalize) : amp_(std::move(amplitudes)) {
    if (amp_.empty()) throw DimensionMismatch("PureState: empty amplitude vector");
    const double n = vector_norm(amp_);
    if (renormalize) {
        if (n < 1e-14) throw ZeroNorm("PureState: cannot renormalize zero vector");
        kernels::scal(cplx{1.0 / n, 0.0}, amp_.data(), amp_.size());
    } else if (std::abs(n * n - 1.0) > 1e-12) {
        throw Error("PureState: amplitudes are not normalized (sum |c_j|^2 != 1)");
    }
}

PureState PureState::basis_state(std::size_t d, std::size_t j) {
    CVector v(d, cplx{0.0, 0.0});
    v.at(j) = 1.0;
    return PureState(std::move(v));
}

DensityOperator::DensityOperator(CMatrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw NonSquare("DensityOperator: matrix is not square");
    if (!m_.all_finite()) throw Error("DensityOperator: non-finite entries");
}

DensityOperator DensityOperator::checked(CMatrix m) {
    DensityOperator rho(std::move(m));
    const StateScore s = state_score(rho.matrix());
    if (s.herm_dev > 1e-10)
        throw NonHermitian("DensityOperator::checked: Hermiticity defect too large");
    if (s.trace_dev > 1e-10)
        throw Error("DensityOperator::checked: trace deviates from 1");
    if (s.pos_dev > 1e-10)
        throw Error("DensityOperator::checked: negative eigenvalue beyond tolerance");
    return rho;
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
    const std::size_t d = psi.dim();
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            m(i, j) = psi[i] * std::conj(psi[j]);
    return DensityOperator(std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(std::size_t d) {
    CMatrix m = CMatrix::identity(d);
    m *= cplx{1.0 / static_cast<double>(d), 0.0};
    return DensityOperator(std::move(m));
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
    const std::size_t ra = a.rows(), ca = a.cols();
    const std::size_t rb = b.rows(), cb = b.cols();
    CMatrix out(ra * rb, ca * cb);
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l)
                    out(i * rb + k, j * cb + l) = aij * b(k, l);
        }
    return out;
}

CVector tensor_product(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) out[i * b.size() + k] = a[i] * b[k];
    return out;
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
    if (!a.is_square() || !b.is_square())
        throw NonSquare("direct_sum: both blocks must be square");
    const std::size_t da = a.rows(), db = b.rows();
    CMatrix out(da + db, da + db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j) out(da + i, da + j) = b(i, j);
    return out;
}

CMatrix partial_trace(const CMatrix& rho, std::size_t d1, std::size_t d2, int keep) {
    if (!rho.is_square() || rho.rows() != d1 * d2)
        throw DimensionMismatch("partial_trace: state dimension is not d1*d2");
    if (keep != 1 && keep != 2)
        throw DimensionMismatch("partial_trace: keep must be 1 or 2");
    if (keep == 1) {
        CMatrix out(d1, d1);
        for (std::size_t i = 0; i < d1; ++i)
            for (std::size_t j = 0; j < d1; ++j) {
                cplx s{0.0, 0.0};
                for (std::size_t k = 0; k < d2; ++k) s += rho(i * d2 + k, j * d2 + k);
                out(i, j) = s;
            }
        return out;
    }
    CMatrix out(d2, d2);
    for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l) {
            cplx s{0.0, 0.0};
            for (std::size_t i = 0; i < d1; ++i) s += rho(i * d2 + k, i * d2 + l);
            out(k, l) = s;
        }
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::size_t d1,
                              std::size_t d2, int keep) {
    return DensityOperator(partial_trace(rho.matrix(), d1, d2, keep));
}

cplx expectation(const DensityOperator& state, const CMatrix& obs) {
    if (obs.rows() != state.dim() || obs.cols() != state.dim())
        throw DimensionMismatch("expectation: observable dimension mismatch");
    // Tr[A rho] without forming the product matrix.
    const CMatrix& rho = state.matrix();
    cplx t{0.0, 0.0};
    const std::size_t d = state.dim();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) t += obs(i, j) * rho(j, i);
    return t;
}

cplx expectation(const PureState& state, const CMatrix& obs) {
    if (obs.rows() != state.dim() || obs.cols() != state.dim())
        throw DimensionMismatch("expectation: observable dimension mismatch");
    const CVector ax = obs * state.amplitudes();
    return inner_product(state.amplitudes(), ax);
}

double purity(const DensityOperator& rho) {
    const CMatrix& m = rho.matrix();
    // Tr[rho^2] = sum_ij rho_ij rho_ji; real for Hermitian rho.
    cplx t{0.0, 0.0};
    const std::size_t d = rho.dim();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) t += m(i, j) * m(j, i);
    return t.real();
}

StateScore state_score(const CMatrix& m) {
    if (!m.is_square()) throw NonSquare("state_score: matrix is not square");
    StateScore s{};
    s.herm_dev = m.hermiticity_defect();
    s.trace_dev = std::abs(m.trace() - cplx{1.0, 0.0});
    CMatrix herm_part = m + m.adjoint();
    herm_part *= cplx{0.5, 0.0};
    const double lam_min = lin::min_hermitian_eigenvalue(herm_part);
    s.pos_dev = std::max(0.0, -lam_min);
    s.score = 1.0 - (s.herm_dev + s.trace_dev + s.pos_dev);
    return s;
}

} // namespace qme
