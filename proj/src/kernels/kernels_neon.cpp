#include "scalex/kernels.hpp"

// NEON kernels for aarch64. float64x2 lanes; float32 inputs are widened
// before accumulation so results stay 64-bit like the scalar reference.

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

namespace scalex::kernels::detail {

namespace {

inline float64x2_t widen_lo(float32x4_t v) { return vcvt_f64_f32(vget_low_f32(v)); }
inline float64x2_t widen_hi(float32x4_t v) { return vcvt_f64_f32(vget_high_f32(v)); }

}  // namespace

void dot3_f32_neon(const float* a, const float* b, std::size_t n,
                   double& ab, double& aa, double& bb) {
    float64x2_t vab = vdupq_n_f64(0.0);
    float64x2_t vaa = vdupq_n_f64(0.0);
    float64x2_t vbb = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t xf = vld1q_f32(a + i);
        const float32x4_t yf = vld1q_f32(b + i);
        const float64x2_t x0 = widen_lo(xf), x1 = widen_hi(xf);
        const float64x2_t y0 = widen_lo(yf), y1 = widen_hi(yf);
        vab = vfmaq_f64(vab, x0, y0);
        vab = vfmaq_f64(vab, x1, y1);
        vaa = vfmaq_f64(vaa, x0, x0);
        vaa = vfmaq_f64(vaa, x1, x1);
        vbb = vfmaq_f64(vbb, y0, y0);
        vbb = vfmaq_f64(vbb, y1, y1);
    }
    double sab = vaddvq_f64(vab);
    double saa = vaddvq_f64(vaa);
    double sbb = vaddvq_f64(vbb);
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

void dot3_f64_neon(const double* a, const double* b, std::size_t n,
                   double& ab, double& aa, double& bb) {
    float64x2_t vab = vdupq_n_f64(0.0);
    float64x2_t vaa = vdupq_n_f64(0.0);
    float64x2_t vbb = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vld1q_f64(a + i);
        const float64x2_t y = vld1q_f64(b + i);
        vab = vfmaq_f64(vab, x, y);
        vaa = vfmaq_f64(vaa, x, x);
        vbb = vfmaq_f64(vbb, y, y);
    }
    double sab = vaddvq_f64(vab);
    double saa = vaddvq_f64(vaa);
    double sbb = vaddvq_f64(vbb);
    for (; i < n; ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    ab = sab;
    aa = saa;
    bb = sbb;
}

double dot_f64_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy_f32_acc_neon(double* acc, const float* x, std::size_t n, double w) {
    const float64x2_t vw = vdupq_n_f64(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t xf = vld1q_f32(x + i);
        float64x2_t a0 = vld1q_f64(acc + i);
        float64x2_t a1 = vld1q_f64(acc + i + 2);
        a0 = vfmaq_f64(a0, vw, widen_lo(xf));
        a1 = vfmaq_f64(a1, vw, widen_hi(xf));
        vst1q_f64(acc + i, a0);
        vst1q_f64(acc + i + 2, a1);
    }
    for (; i < n; ++i) {
        acc[i] += w * static_cast<double>(x[i]);
    }
}

void axpy_f64_neon(double* acc, const double* x, std::size_t n, double w) {
    const float64x2_t vw = vdupq_n_f64(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t a0 = vld1q_f64(acc + i);
        a0 = vfmaq_f64(a0, vw, vld1q_f64(x + i));
        vst1q_f64(acc + i, a0);
    }
    for (; i < n; ++i) {
        acc[i] += w * x[i];
    }
}

double sqdist_f64_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

const Ops neon_ops = {
    dot3_f32_neon,
    dot3_f64_neon,
    dot_f64_neon,
    axpy_f32_acc_neon,
    axpy_f64_neon,
    sqdist_f64_neon,
};

}  // namespace scalex::kernels::detail

#endif  // aarch64
