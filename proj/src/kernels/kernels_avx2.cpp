#include "scalex/kernels.hpp"

// AVX2+FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// only ever dispatched to after a runtime cpuid check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace scalex::kernels::detail {

namespace {

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

// Widen 4 floats to 4 doubles.
inline __m256d load4_f32_as_f64(const float* p) {
    return _mm256_cvtps_pd(_mm_loadu_ps(p));
}

}  // namespace

void dot3_f32_avx2(const float* a, const float* b, std::size_t n,
                   double& ab, double& aa, double& bb) {
    __m256d vab = _mm256_setzero_pd();
    __m256d vaa = _mm256_setzero_pd();
    __m256d vbb = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = load4_f32_as_f64(a + i);
        const __m256d y = load4_f32_as_f64(b + i);
        vab = _mm256_fmadd_pd(x, y, vab);
        vaa = _mm256_fmadd_pd(x, x, vaa);
        vbb = _mm256_fmadd_pd(y, y, vbb);
    }
    double sab = hsum_pd(vab);
    double saa = hsum_pd(vaa);
    double sbb = hsum_pd(vbb);
    for (; i < n; ++i) {
        const double x = a[i];
        const double y = b[i];
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    ab = sab;
    aa = saa;
    bb = sbb;
}

void dot3_f64_avx2(const double* a, const double* b, std::size_t n,
                   double& ab, double& aa, double& bb) {
    __m256d vab = _mm256_setzero_pd();
    __m256d vaa = _mm256_setzero_pd();
    __m256d vbb = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(a + i);
        const __m256d y = _mm256_loadu_pd(b + i);
        vab = _mm256_fmadd_pd(x, y, vab);
        vaa = _mm256_fmadd_pd(x, x, vaa);
        vbb = _mm256_fmadd_pd(y, y, vbb);
    }
    double sab = hsum_pd(vab);
    double saa = hsum_pd(vaa);
    double sbb = hsum_pd(vbb);
    for (; i < n; ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    ab = sab;
    aa = saa;
    bb = sbb;
}

double dot_f64_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy_f32_acc_avx2(double* acc, const float* x, std::size_t n, double w) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = load4_f32_as_f64(x + i);
        const __m256d va = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(vw, vx, va));
    }
    for (; i < n; ++i) {
        acc[i] += w * static_cast<double>(x[i]);
    }
}

void axpy_f64_avx2(double* acc, const double* x, std::size_t n, double w) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d va = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(vw, vx, va));
    }
    for (; i < n; ++i) {
        acc[i] += w * x[i];
    }
}

double sqdist_f64_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum_pd(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

const Ops avx2_ops = {
    dot3_f32_avx2,
    dot3_f64_avx2,
    dot_f64_avx2,
    axpy_f32_acc_avx2,
    axpy_f64_avx2,
    sqdist_f64_avx2,
};

}  // namespace scalex::kernels::detail

#endif  // x86-64
