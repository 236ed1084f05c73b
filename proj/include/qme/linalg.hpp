// linalg.hpp — Dense decompositions and the matrix exponential. Eigensolvers,
// SVD and LU factorizations are delegated to Eigen behind this interface; the
// exponential is a Pade-13 scaling-and-squaring implementation on top of the
// qme kernels.

#pragma once

#include <vector>

#include "qme/matrix.hpp"

namespace qme::lin {

struct HermEig {
    std::vector<double> eigenvalues; // ascending
    CMatrix vectors;                 // eigenvectors as columns, phase-fixed
};

// Eigendecomposition of a Hermitian matrix. The phase of each eigenvector is
// fixed so its largest-magnitude component is real positive.
HermEig hermitian_eig(const CMatrix& m);

struct BiorthEig {
    std::vector<cplx> eigenvalues;
    CMatrix right;        // right eigenvectors as columns
    CMatrix left_adjoint; // row k is the matching normalized left eigenvector (dagger)
};

// General (non-Hermitian) eigendecomposition with bi-orthonormal left/right
// pairs, left_adjoint * right == identity. Throws DefectiveGenerator when the
// eigenvector basis is numerically singular.
BiorthEig bi_orthogonal_eig(const CMatrix& m, double cond_tol = 1e-13);

// Basis of the (numerical) null space: right singular vectors whose singular
// value is <= rel_tol * sigma_max. Empty result means trivial null space.
std::vector<CVector> null_space(const CMatrix& m, double rel_tol = 1e-10);

// Solve a x = b for square a (partial-pivot LU).
CMatrix solve(const CMatrix& a, const CMatrix& b);

// exp(a) by Pade-13 approximant with standard 1-norm scaling and squaring.
CMatrix expm(const CMatrix& a);

double operator_norm(const CMatrix& m);       // largest singular value
double min_hermitian_eigenvalue(const CMatrix& m);

} // namespace qme::lin
