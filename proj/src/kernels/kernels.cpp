#include "scalex/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace scalex::kernels {

namespace detail {
extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
extern const Ops neon_ops;
#endif
}  // namespace detail

const char* impl_name(Impl impl) {
    switch (impl) {
        case Impl::scalar: return "scalar";
        case Impl::avx2: return "avx2";
        case Impl::neon: return "neon";
    }
    return "unknown";
}

namespace {

bool cpu_supports(Impl impl) {
    switch (impl) {
        case Impl::scalar:
            return true;
        case Impl::avx2:
#if defined(__x86_64__) && defined(__GNUC__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Impl::neon:
#if defined(__aarch64__) || defined(_M_ARM64)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Impl pick_default() {
    if (const char* env = std::getenv("SCALEX_KERNEL_IMPL")) {
        const std::string want(env);
        for (Impl impl : {Impl::scalar, Impl::avx2, Impl::neon}) {
            if (want == impl_name(impl) && cpu_supports(impl)) {
                return impl;
            }
        }
        // Unknown or unsupported request falls through to autodetect.
    }
#if defined(__aarch64__) || defined(_M_ARM64)
    return Impl::neon;
#else
    return cpu_supports(Impl::avx2) ? Impl::avx2 : Impl::scalar;
#endif
}

std::atomic<Impl> g_active{pick_default()};

}  // namespace

const Ops& get(Impl impl) {
    switch (impl) {
        case Impl::scalar:
            return detail::scalar_ops;
        case Impl::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (cpu_supports(Impl::avx2)) return detail::avx2_ops;
#endif
            break;
        case Impl::neon:
#if defined(__aarch64__) || defined(_M_ARM64)
            return detail::neon_ops;
#endif
            break;
    }
    throw std::invalid_argument(std::string("kernel variant unavailable on this CPU: ") +
                                impl_name(impl));
}

const Ops& active() { return get(g_active.load(std::memory_order_relaxed)); }

Impl active_impl() { return g_active.load(std::memory_order_relaxed); }

std::vector<Impl> available() {
    std::vector<Impl> out;
    for (Impl impl : {Impl::scalar, Impl::avx2, Impl::neon}) {
        if (cpu_supports(impl)) out.push_back(impl);
    }
    return out;
}

void force(Impl impl) {
    get(impl);  // validate
    g_active.store(impl, std::memory_order_relaxed);
}

}  // namespace scalex::kernels
