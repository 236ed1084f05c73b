// operators.hpp — Small standard operators: Pauli matrices, ladder operators,
// basis vectors and projectors.

#pragma once

#include "qme/matrix.hpp"

namespace qme::ops {

inline CMatrix sigma_x() {
    CMatrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

inline CMatrix sigma_y() {
    CMatrix m(2, 2);
    m(0, 1) = cplx{0.0, -1.0};
    m(1, 0) = cplx{0.0, 1.0};
    return m;
}

inline CMatrix sigma_z() {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// |i><j| in dimension d
inline CMatrix ketbra(std::size_t d, std::size_t i, std::size_t j) {
    CMatrix m(d, d);
    m(i, j) = 1.0;
    return m;
}

inline CVector basis_vector(std::size_t d, std::size_t j) {
    CVector v(d, cplx{0.0, 0.0});
    v[j] = 1.0;
    return v;
}

// Bosonic annihilation operator truncated to n_max+1 photon states.
inline CMatrix annihilation(std::size_t n_max) {
    CMatrix a(n_max + 1, n_max + 1);
    for (std::size_t n = 1; n <= n_max; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline CMatrix number_operator(std::size_t n_max) {
    CMatrix n(n_max + 1, n_max + 1);
    for (std::size_t k = 0; k <= n_max; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

} // namespace qme::ops
