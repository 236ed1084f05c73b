#include "qme/matrix.hpp"

#include <cmath>
#include <utility>

#include "qme/kernels.hpp"

namespace qme {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionMismatch("CMatrix: entry count does not match rows*cols");
}

CMatrix CMatrix::identity(std::size_t d) {
    CMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = cplx{1.0, 0.0};
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out(j, i) = std::conj((*this)(i, j));
    return out;
}

CMatrix CMatrix::transpose() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

CMatrix CMatrix::conjugate() const {
    CMatrix out = *this;
    for (auto& z : out.data_) z = std::conj(z);
    return out;
}

cplx CMatrix::trace() const {
    if (!is_square()) throw NonSquare("trace: matrix is not square");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    return std::sqrt(kernels::nrm2sq(data_.data(), data_.size()));
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double CMatrix::one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double CMatrix::hermiticity_defect() const {
    if (!is_square()) throw NonSquare("hermiticity_defect: matrix is not square");
    double acc = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            const cplx d = (*this)(i, j) - std::conj((*this)(j, i));
            acc += std::norm(d);
        }
    return std::sqrt(acc);
}

bool CMatrix::all_finite() const {
    for (const auto& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw DimensionMismatch("matrix addition: shape mismatch");
    kernels::axpy(cplx{1.0, 0.0}, rhs.data_.data(), data_.data(), data_.size());
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw DimensionMismatch("matrix subtraction: shape mismatch");
    kernels::axpy(cplx{-1.0, 0.0}, rhs.data_.data(), data_.data(), data_.size());
    return *this;
}

CMatrix& CMatrix::operator*=(cplx alpha) {
    kernels::scal(alpha, data_.data(), data_.size());
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionMismatch("matrix product: inner dimensions differ");
    CMatrix c(a.rows(), b.cols());
    kernels::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

CVector operator*(const CMatrix& a, const CVector& x) {
    if (a.cols() != x.size())
        throw DimensionMismatch("matrix-vector product: size mismatch");
    CVector y(a.rows());
    kernels::gemv(a.data(), x.data(), y.data(), a.rows(), a.cols());
    return y;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

double vector_norm(const CVector& x) {
    return std::sqrt(kernels::nrm2sq(x.data(), x.size()));
}

cplx inner_product(const CVector& x, const CVector& y) {
    if (x.size() != y.size())
        throw DimensionMismatch("inner_product: size mismatch");
    return kernels::dotc(x.data(), y.data(), x.size());
}

} // namespace qme
