#include "qme/liouville.hpp"

#include <cmath>
#include <utility>

#include "qme/linalg.hpp"

namespace qme {

Liouvillian::Liouvillian(CMatrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw NonSquare("Liouvillian: matrix is not square");
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(double(m_.rows()))));
    if (d * d != m_.rows())
        throw LengthNotSquare("Liouvillian: side length is not a perfect square");
    dim_ = d;
}

CVector vectorize(const CMatrix& rho) {
    if (!rho.is_square()) throw NonSquare("vectorize: matrix is not square");
    const std::size_t d = rho.rows();
    CVector v(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) v[j * d + i] = rho(i, j);
    return v;
}

CMatrix devectorize(const CVector& v) {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size())
        throw LengthNotSquare("devectorize: length is not a perfect square");
    CMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) m(i, j) = v[j * d + i];
    return m;
}

Liouvillian build_liouvillian(const CMatrix& h, const std::vector<LindbladChannel>& channels) {
    if (!h.is_square()) throw NonSquare("build_liouvillian: Hamiltonian is not square");
    if (!h.is_hermitian(1e-10))
        throw NonHermitianHamiltonian("build_liouvillian: Hamiltonian is not Hermitian");
    const std::size_t d = h.rows();
    const CMatrix id = CMatrix::identity(d);

    CMatrix l = tensor_product(id, h) - tensor_product(h.transpose(), id);
    l *= cplx{0.0, -1.0};

    for (std::size_t k = 0; k < channels.size(); ++k) {
        const auto& ch = channels[k];
        if (!ch.op.is_square() || ch.op.rows() != d)
            throw DimensionMismatch("build_liouvillian: channel " + std::to_string(k) +
                                    " dimension mismatch");
        if (ch.rate < 0.0)
            throw Error("build_liouvillian: channel " + std::to_string(k) +
                        " has negative rate");
        if (ch.rate == 0.0) continue;
        const CMatrix lk = std::sqrt(ch.rate) * ch.op;
        const CMatrix ldl = lk.adjoint() * lk;
        l += tensor_product(lk.conjugate(), lk);
        CMatrix half = tensor_product(id, ldl) + tensor_product(ldl.transpose(), id);
        half *= cplx{0.5, 0.0};
        l -= half;
    }
    return Liouvillian(std::move(l));
}

CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h,
                     const std::vector<LindbladChannel>& channels) {
    if (!rho.is_square() || rho.rows() != h.rows() || !h.is_square())
        throw DimensionMismatch("lindblad_rhs: dimension mismatch");
    CMatrix out = commutator(h, rho);
    out *= cplx{0.0, -1.0};
    for (const auto& ch : channels) {
        if (!ch.op.is_square() || ch.op.rows() != rho.rows())
            throw DimensionMismatch("lindblad_rhs: channel dimension mismatch");
        if (ch.rate == 0.0) continue;
        const CMatrix lk = std::sqrt(ch.rate) * ch.op;
        const CMatrix ldl = lk.adjoint() * lk;
        out += lk * rho * lk.adjoint();
        CMatrix ac = anticommutator(ldl, rho);
        ac *= cplx{0.5, 0.0};
        out -= ac;
    }
    return out;
}

std::vector<CMatrix> steady_states(const Liouvillian& l, double rel_tol) {
    const auto basis = lin::null_space(l.matrix(), rel_tol);
    if (basis.empty())
        throw EmptyNullSpace(
            "steady_states: no null vector found; a trace-preserving generator "
            "always has at least one");
    std::vector<CMatrix> out;
    out.reserve(basis.size());
    for (const auto& v : basis) {
        CMatrix m = devectorize(v);
        const cplx tr = m.trace();
        if (std::abs(tr) > 1e-8 * m.frobenius_norm()) {
            m *= cplx{1.0, 0.0} / tr;
            CMatrix sym = m + m.adjoint();
            sym *= cplx{0.5, 0.0};
            m = std::move(sym);
        }
        out.push_back(std::move(m));
    }
    return out;
}

double trace_preservation_defect(const Liouvillian& l) {
    const std::size_t d = l.dim();
    const CMatrix& m = l.matrix();
    double worst = 0.0;
    for (std::size_t c = 0; c < d * d; ++c) {
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < d; ++i) s += m(i * d + i, c);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

} // namespace qme
