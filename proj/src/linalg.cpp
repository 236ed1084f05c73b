#include "qme/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qme::lin {

namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<const EMat>;

EMap emap(const CMatrix& m) {
    return EMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}

CMatrix from_eigen(const EMat& e) {
    CMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    Eigen::Map<EMat>(m.data(), e.rows(), e.cols()) = e;
    return m;
}

void fix_column_phase(EMat& v) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, k));
            if (a > best) { best = a; imax = i; }
        }
        if (best > 0.0) v.col(k) *= std::conj(v(imax, k)) / std::abs(v(imax, k));
    }
}

} // namespace

HermEig hermitian_eig(const CMatrix& m) {
    if (!m.is_square()) throw NonSquare("hermitian_eig: matrix is not square");
    Eigen::SelfAdjointEigenSolver<EMat> es(emap(m));
    if (es.info() != Eigen::Success)
        throw Error("hermitian_eig: eigensolver failed to converge");
    EMat v = es.eigenvectors(); // ascending by construction
    fix_column_phase(v);
    HermEig out;
    out.eigenvalues.assign(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    out.vectors = from_eigen(v);
    return out;
}

BiorthEig bi_orthogonal_eig(const CMatrix& m, double cond_tol) {
    if (!m.is_square()) throw NonSquare("bi_orthogonal_eig: matrix is not square");
    Eigen::ComplexEigenSolver<EMat> es(emap(m), /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw Error("bi_orthogonal_eig: eigensolver failed to converge");
    EMat v = es.eigenvectors();
    // Reciprocal condition of the eigenvector basis decides whether the
    // left vectors (rows of V^{-1}) are meaningful.
    Eigen::JacobiSVD<EMat> svd(v);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= cond_tol * sv(0))
        throw DefectiveGenerator(
            "bi_orthogonal_eig: eigenvector basis is numerically singular "
            "(defective or near-defective generator)");
    EMat w = v.partialPivLu().inverse();
    BiorthEig out;
    out.eigenvalues.assign(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    out.right = from_eigen(v);
    out.left_adjoint = from_eigen(w);
    return out;
}

std::vector<CVector> null_space(const CMatrix& m, double rel_tol) {
    Eigen::JacobiSVD<EMat> svd(emap(m), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() ? rel_tol * sv(0) : 0.0;
    std::vector<CVector> basis;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) <= cutoff) {
            const Eigen::Matrix<cplx, Eigen::Dynamic, 1> col = svd.matrixV().col(k);
            basis.emplace_back(col.data(), col.data() + col.size());
        }
    }
    return basis;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    if (!a.is_square()) throw NonSquare("solve: coefficient matrix is not square");
    if (a.rows() != b.rows()) throw DimensionMismatch("solve: rhs row count mismatch");
    EMat x = emap(a).partialPivLu().solve(EMat(emap(b)));
    return from_eigen(x);
}

CMatrix expm(const CMatrix& a) {
    if (!a.is_square()) throw NonSquare("expm: matrix is not square");
    const std::size_t d = a.rows();
    const CMatrix id = CMatrix::identity(d);

    // Pade-13 coefficients.
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double nrm = a.one_norm();
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    CMatrix x = a;
    if (s > 0) x *= cplx{std::ldexp(1.0, -s), 0.0};

    const CMatrix x2 = x * x;
    const CMatrix x4 = x2 * x2;
    const CMatrix x6 = x4 * x2;

    CMatrix u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
    CMatrix u = x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
    CMatrix v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
    CMatrix v = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

    CMatrix r = solve(v - u, v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

double operator_norm(const CMatrix& m) {
    Eigen::JacobiSVD<EMat> svd(emap(m));
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double min_hermitian_eigenvalue(const CMatrix& m) {
    if (!m.is_square()) throw NonSquare("min_hermitian_eigenvalue: not square");
    Eigen::SelfAdjointEigenSolver<EMat> es(emap(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace qme::lin
