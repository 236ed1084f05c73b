// operator_core.hpp — Quantum state objects and the composition/reduction
// primitives they live on: tensor product, direct sum, partial trace,
// expectation values, purity and the density-operator diagnostic score.

#pragma once

#include <vector>

#include "qme/matrix.hpp"

namespace qme {

class PureState {
public:
    // Amplitudes must be normalized to 1 within 1e-12 unless renormalize is set.
    explicit PureState(CVector amplitudes, bool renormalize = false);
    static PureState basis_state(std::size_t d, std::size_t j);

    std::size_t dim() const { return amp_.size(); }
    const CVector& amplitudes() const { return amp_; }
    const cplx& operator[](std::size_t j) const { return amp_[j]; }

private:
    CVector amp_;
};

class DensityOperator {
public:
    // Wraps a square, finite matrix. Does not enforce the physicality
    // invariants; propagation output carries small numerical defects by
    // nature. Use checked() for strict construction and state_score() for
    // diagnostics.
    explicit DensityOperator(CMatrix m);

    // Enforces Hermiticity (1e-10 Frobenius), unit trace (1e-10) and
    // positivity (min eigenvalue >= -1e-10).
    static DensityOperator checked(CMatrix m);
    static DensityOperator from_pure(const PureState& psi);
    // Maximally mixed state 1/d.
    static DensityOperator maximally_mixed(std::size_t d);

    std::size_t dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

struct StateScore {
    double score;     // 1 - (herm_dev + trace_dev + pos_dev)
    double herm_dev;  // ||m - m^dag||_F
    double trace_dev; // |Tr m - 1|
    double pos_dev;   // max(0, -lambda_min of the Hermitian part)
};

// Kronecker product, (a (x) b)[i*rb+k, j*cb+l] = a[i,j] b[k,l].
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);
CVector tensor_product(const CVector& a, const CVector& b);

// Block-diagonal composition of two square matrices.
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

// Reduce a bipartite (d1 x d2) state to the subsystem selected by keep (1 or 2).
CMatrix partial_trace(const CMatrix& rho, std::size_t d1, std::size_t d2, int keep);
DensityOperator partial_trace(const DensityOperator& rho, std::size_t d1,
                              std::size_t d2, int keep);

cplx expectation(const DensityOperator& state, const CMatrix& obs); // Tr[A rho]
cplx expectation(const PureState& state, const CMatrix& obs);       // <psi|A|psi>

double purity(const DensityOperator& rho); // Tr[rho^2]

// Diagnostic: how far a matrix is from being a density operator. The score
// is exactly 1 when all three deviations vanish at tolerance 1e-12.
StateScore state_score(const CMatrix& m);

} // namespace qme
