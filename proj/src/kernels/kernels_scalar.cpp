#include "scalex/kernels.hpp"

// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against; keep them obvious.

namespace scalex::kernels::detail {

void dot3_f32_scalar(const float* a, const float* b, std::size_t n,
                     double& ab, double& aa, double& bb) {
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
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

void dot3_f64_scalar(const double* a, const double* b, std::size_t n,
                     double& ab, double& aa, double& bb) {
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += a[i] * b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
    }
    ab = sab;
    aa = saa;
    bb = sbb;
}

double dot_f64_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy_f32_acc_scalar(double* acc, const float* x, std::size_t n, double w) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += w * static_cast<double>(x[i]);
    }
}

void axpy_f64_scalar(double* acc, const double* x, std::size_t n, double w) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += w * x[i];
    }
}

double sqdist_f64_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

const Ops scalar_ops = {
    dot3_f32_scalar,
    dot3_f64_scalar,
    dot_f64_scalar,
    axpy_f32_acc_scalar,
    axpy_f64_scalar,
    sqdist_f64_scalar,
};

}  // namespace scalex::kernels::detail
