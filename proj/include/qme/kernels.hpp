// kernels.hpp — Dense complex arithmetic kernels: scalar reference implementations
// plus SIMD variants selected at runtime. All matrices are row-major contiguous.

#pragma once

#include <complex>
#include <cstddef>

namespace qme::kernels {

using cplx = std::complex<double>;

// Scalar reference kernels. Always available; the ground truth the SIMD
// variants are equivalence-tested against.
namespace scalar {
void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n);   // c = a(mxk) b(kxn)
void gemv(const cplx* a, const cplx* x, cplx* y,
          std::size_t m, std::size_t k);                  // y = a(mxk) x
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n); // y += alpha x
void scal(cplx alpha, cplx* x, std::size_t n);                // x *= alpha
cplx dotc(const cplx* x, const cplx* y, std::size_t n);       // sum conj(x) y
double nrm2sq(const cplx* x, std::size_t n);                  // sum |x|^2
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QME_HAVE_AVX2_KERNELS 1
namespace avx2 {
void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n);
void gemv(const cplx* a, const cplx* x, cplx* y,
          std::size_t m, std::size_t k);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void scal(cplx alpha, cplx* x, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double nrm2sq(const cplx* x, std::size_t n);
} // namespace avx2
#endif

// True when the running CPU supports the AVX2+FMA variants.
bool avx2_available();

// Dispatched entry points; resolved once on first use.
void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n);
void gemv(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t k);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void scal(cplx alpha, cplx* x, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double nrm2sq(const cplx* x, std::size_t n);

// Name of the backend the dispatcher picked ("avx2" or "scalar").
const char* backend_name();

} // namespace qme::kernels
