// Runtime backend selection for the complex arithmetic kernels.

#include "qme/kernels.hpp"

namespace qme::kernels {

bool avx2_available() {
#if defined(QME_HAVE_AVX2_KERNELS)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

struct Table {
    void (*gemm)(const cplx*, const cplx*, cplx*, std::size_t, std::size_t, std::size_t);
    void (*gemv)(const cplx*, const cplx*, cplx*, std::size_t, std::size_t);
    void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
    void (*scal)(cplx, cplx*, std::size_t);
    cplx (*dotc)(const cplx*, const cplx*, std::size_t);
    double (*nrm2sq)(const cplx*, std::size_t);
    const char* name;
};

Table pick() {
#if defined(QME_HAVE_AVX2_KERNELS)
    if (avx2_available())
        return {avx2::gemm, avx2::gemv, avx2::axpy,
                avx2::scal, avx2::dotc, avx2::nrm2sq, "avx2"};
#endif
    return {scalar::gemm, scalar::gemv, scalar::axpy,
            scalar::scal, scalar::dotc, scalar::nrm2sq, "scalar"};
}

const Table& table() {
    static const Table t = pick();
    return t;
}

} // namespace

void gemm(const cplx* a, const cplx* b, cplx* c,
          std::size_t m, std::size_t k, std::size_t n) {
    table().gemm(a, b, c, m, k, n);
}
void gemv(const cplx* a, const cplx* x, cplx* y, std::size_t m, std::size_t k) {
    table().gemv(a, x, y, m, k);
}
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}
void scal(cplx alpha, cplx* x, std::size_t n) { table().scal(alpha, x, n); }
cplx dotc(const cplx* x, const cplx* y, std::size_t n) { return table().dotc(x, y, n); }
double nrm2sq(const cplx* x, std::size_t n) { return table().nrm2sq(x, n); }
const char* backend_name() { return table().name; }

} // namespace qme::kernels
