#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Data-parallel inner loops shared by the analysis engine. Every kernel has a
// scalar reference implementation plus SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at startup from CPU features; tests run all available
// variants against the scalar reference.
//
// All reductions accumulate in 64-bit floats regardless of input width.

namespace scalex::kernels {

enum class Impl {
    scalar,
    avx2,
    neon,
};

const char* impl_name(Impl impl);

struct Ops {
    // ab = dot(a,b), aa = dot(a,a), bb = dot(b,b) in one pass.
    void (*dot3_f32)(const float* a, const float* b, std::size_t n,
                     double& ab, double& aa, double& bb);
    void (*dot3_f64)(const double* a, const double* b, std::size_t n,
                     double& ab, double& aa, double& bb);

    double (*dot_f64)(const double* a, const double* b, std::size_t n);

    // acc[i] += w * x[i]
    void (*axpy_f32_acc)(double* acc, const float* x, std::size_t n, double w);
    void (*axpy_f64)(double* acc, const double* x, std::size_t n, double w);

    // sum((a[i]-b[i])^2)
    double (*sqdist_f64)(const double* a, const double* b, std::size_t n);
};

// Variant selected at startup (honors SCALEX_KERNEL_IMPL=scalar|avx2|neon).
const Ops& active();
Impl active_impl();

// Specific variant; throws std::invalid_argument when unsupported on this CPU.
const Ops& get(Impl impl);

std::vector<Impl> available();

// Test hook: override the active variant for the rest of the process.
void force(Impl impl);

}  // namespace scalex::kernels
