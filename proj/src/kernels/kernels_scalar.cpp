#include "qme/kernels.hpp"

#include <cstring>

namespace qme::kernels::scalar {

void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n) {
    std::memset(static_cast<void*>(c), 0, m * n * sizeof(cplx));
    for (std::size_t i = 0; i < m; ++i) {
        cplx* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const cplx aip = a[i * k + p];
            if (aip == cplx{0.0, 0.0}) continue;
            const cplx* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void gemv(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i) {
        cplx acc{0.0, 0.0};
        const cplx* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) acc += ai[p] * x[p];
        y[i] = acc;
    }
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(cplx alpha, cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double nrm2sq(const cplx* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

} // namespace qme::kernels::scalar
