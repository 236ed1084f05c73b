// AVX2+FMA kernels for interleaved complex<double>. Two complex values per
// 256-bit register. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after an avx2_available() check.

#include "qme/kernels.hpp"

#if defined(QME_HAVE_AVX2_KERNELS)

#include <immintrin.h>
#include <cstring>

namespace qme::kernels::avx2 {

namespace {

// (re,im) pairs: swap re<->im within each complex slot.
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0x5); }

// acc += s * v for a single broadcast complex s over packed complex v.
// even lanes: sr*vr - si*vi, odd lanes: sr*vi + si*vr.
inline __m256d cmadd(__m256d sr, __m256d si, __m256d v, __m256d acc) {
    const __m256d t = _mm256_mul_pd(si, swap_ri(v));
    return _mm256_add_pd(acc, _mm256_fmaddsub_pd(sr, v, t));
}

} // namespace

void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n) {
    std::memset(static_cast<void*>(c), 0, m * n * sizeof(cplx));
    const double* bd = reinterpret_cast<const double*>(b);
    double* cd = reinterpret_cast<double*>(c);
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = cd + 2 * i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const cplx aip = a[i * k + p];
            if (aip == cplx{0.0, 0.0}) continue;
            const __m256d ar = _mm256_set1_pd(aip.real());
            const __m256d ai = _mm256_set1_pd(aip.imag());
            const double* bp = bd + 2 * p * n;
            std::size_t j = 0;
            for (; j + 2 <= n; j += 2) {
                __m256d acc = _mm256_loadu_pd(ci + 2 * j);
                acc = cmadd(ar, ai, _mm256_loadu_pd(bp + 2 * j), acc);
                _mm256_storeu_pd(ci + 2 * j, acc);
            }
            if (j < n) { // odd trailing column
                const cplx bv = b[p * n + j];
                cplx* cij = c + i * n + j;
                *cij += aip * bv;
            }
        }
    }
}

void gemv(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t k) {
    const double* xd = reinterpret_cast<const double*>(x);
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = reinterpret_cast<const double*>(a + i * k);
        __m256d acc = _mm256_setzero_pd();
        std::size_t p = 0;
        for (; p + 2 <= k; p += 2) {
            const __m256d av = _mm256_loadu_pd(ai + 2 * p);
            const __m256d xv = _mm256_loadu_pd(xd + 2 * p);
            const __m256d are = _mm256_movedup_pd(av);       // (ar,ar,...)
            const __m256d aim = _mm256_permute_pd(av, 0xF);  // (ai,ai,...)
            acc = cmadd(are, aim, xv, acc);
        }
        alignas(32) double buf[4];
        _mm256_store_pd(buf, acc);
        cplx s{buf[0] + buf[2], buf[1] + buf[3]};
        for (; p < k; ++p) s += a[i * k + p] * x[p];
        y[i] = s;
    }
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d acc = _mm256_loadu_pd(yd + 2 * i);
        acc = cmadd(ar, ai, _mm256_loadu_pd(xd + 2 * i), acc);
        _mm256_storeu_pd(yd + 2 * i, acc);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal(cplx alpha, cplx* x, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    double* xd = reinterpret_cast<double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(xd + 2 * i);
        const __m256d t = _mm256_mul_pd(ai, swap_ri(v));
        _mm256_storeu_pd(xd + 2 * i, _mm256_fmaddsub_pd(ar, v, t));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        const __m256d xre = _mm256_movedup_pd(xv);
        const __m256d xim = _mm256_permute_pd(xv, 0xF);
        // conj(x)*y: even lanes xr*yr + xi*yi, odd lanes xr*yi - xi*yr
        const __m256d t = _mm256_mul_pd(xim, swap_ri(yv));
        acc = _mm256_add_pd(acc, _mm256_fmsubadd_pd(xre, yv, t));
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, acc);
    cplx s{buf[0] + buf[2], buf[1] + buf[3]};
    for (; i < n; ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double nrm2sq(const cplx* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; 2 * i + 4 <= 2 * n; i += 2) {
        const __m256d v = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double buf[4];
    _mm256_store_pd(buf, acc);
    double s = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

} // namespace qme::kernels::avx2

#endif // QME_HAVE_AVX2_KERNELS
