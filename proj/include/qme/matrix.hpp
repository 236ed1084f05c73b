// matrix.hpp — Dense row-major complex matrix, the workhorse value type.
// Arithmetic routes through the dispatched kernels.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qme/errors.hpp"

namespace qme {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t d);
    static CMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conjugate() const;
    cplx trace() const;

    double frobenius_norm() const;
    double max_abs() const;
    double one_norm() const;          // max column sum of |entries|
    double hermiticity_defect() const; // ||m - m^dag||_F
    bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }
    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(cplx alpha);

    friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
    friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
    friend CMatrix operator*(CMatrix lhs, cplx alpha) { return lhs *= alpha; }
    friend CMatrix operator*(cplx alpha, CMatrix rhs) { return rhs *= alpha; }
    friend CMatrix operator*(CMatrix lhs, double alpha) { return lhs *= cplx{alpha, 0.0}; }
    friend CMatrix operator*(double alpha, CMatrix rhs) { return rhs *= cplx{alpha, 0.0}; }
    friend CMatrix operator-(CMatrix m) { return m *= cplx{-1.0, 0.0}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& a, const CVector& x);

CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

double vector_norm(const CVector& x);
cplx inner_product(const CVector& x, const CVector& y); // conj(x) . y

} // namespace qme
