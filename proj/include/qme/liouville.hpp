// liouville.hpp — Vectorization, Lindblad generator assembly in superoperator
// form, the direct right-hand side (the oracle the assembled matrix is tested
// against), and steady states from the generator's null space.

#pragma once

#include <string_view>
#include <vector>

#include "qme/matrix.hpp"
#include "qme/operator_core.hpp"

namespace qme {

// Jump operator with its rate. Rates are kept separate in the public type and
// folded as L' = sqrt(rate) L inside the generator routines.
struct LindbladChannel {
    CMatrix op;
    double rate = 0.0;
};

class Liouvillian {
public:
    // Column-stacking convention throughout: vec(rho)[j*d+i] = rho[i,j].
    static constexpr std::string_view ordering = "column";

    Liouvillian() = default;
    explicit Liouvillian(CMatrix m);

    std::size_t dim() const { return dim_; }           // Hilbert space dimension d
    const CMatrix& matrix() const { return m_; }       // d^2 x d^2
    CMatrix& matrix() { return m_; }

private:
    CMatrix m_;
    std::size_t dim_ = 0;
};

CVector vectorize(const CMatrix& rho);
CMatrix devectorize(const CVector& v); // throws LengthNotSquare

// L = -i(1 (x) H - H^T (x) 1)
//     + sum_k rate_k [ Lk* (x) Lk - 1/2 (1 (x) Lk^dag Lk + Lk^T Lk* (x) 1) ]
Liouvillian build_liouvillian(const CMatrix& h, const std::vector<LindbladChannel>& channels);

// -i[H,rho] + sum_k rate_k (Lk rho Lk^dag - 1/2 {Lk^dag Lk, rho}), computed
// directly from matrix products. Independent oracle for build_liouvillian.
CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h,
                     const std::vector<LindbladChannel>& channels);

// Null-space basis of the generator (relative singular-value threshold).
// Basis elements with non-negligible trace are rescaled to trace one and
// symmetrized; trace-free elements are returned raw.
std::vector<CMatrix> steady_states(const Liouvillian& l, double rel_tol = 1e-10);

// max_c |(vec 1)^dag L e_c|; zero for a trace-preserving generator.
double trace_preservation_defect(const Liouvillian& l);

} // namespace qme
