// Compiled with -mavx2 -mfma. Only reached through avx2_table(), which checks
// the CPU first.
#include <immintrin.h>

#include "polarqc/kernels.hpp"

namespace polarqc::kernels::avx2 {
namespace {

// Two complex doubles per register, interleaved (re, im, re, im).
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d mul2(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void cmul(cplx* y, const cplx* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) store2(y + i, mul2(load2(y + i), load2(x + i)));
    for (; i < n; ++i) y[i] *= x[i];
}

double norm2(const cplx* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = load2(x + i);
        const __m256d v1 = load2(x + i + 2);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load2(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += std::norm(x[i]);
    return s;
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    // direct = (ar br, ai bi), cross = (ai br, ar bi)
    __m256d direct = _mm256_setzero_pd();
    __m256d cross = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = load2(a + i);
        const __m256d vb = load2(b + i);
        direct = _mm256_fmadd_pd(va, vb, direct);
        cross = _mm256_fmadd_pd(_mm256_permute_pd(va, 0x5), vb, cross);
    }
    alignas(32) double d[4], c[4];
    _mm256_store_pd(d, direct);
    _mm256_store_pd(c, cross);
    double re = (d[0] + d[1]) + (d[2] + d[3]);
    double im = (c[1] - c[0]) + (c[3] - c[2]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = load2(x + i);
        const __m256d prod = _mm256_fmaddsub_pd(vx, ar, _mm256_mul_pd(_mm256_permute_pd(vx, 0x5), ai));
        store2(y + i, _mm256_add_pd(load2(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace polarqc::kernels::avx2
