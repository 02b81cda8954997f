#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "scalex/kernels.hpp"

using namespace scalex;

namespace {

// Sizes chosen to hit empty input, sub-lane tails, exact lane multiples and
// large buffers.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 255, 1024, 4097};

}  // namespace

TEST_CASE("scalar is always available and active impl is valid") {
    const auto impls = kernels::available();
    REQUIRE(!impls.empty());
    CHECK(impls.front() == kernels::Impl::scalar);
    CHECK_NOTHROW(kernels::get(kernels::active_impl()));
}

TEST_CASE("every available variant matches the scalar reference") {
    std::mt19937_64 rng(42);
    const auto& scalar = kernels::get(kernels::Impl::scalar);

    for (kernels::Impl impl : kernels::available()) {
        if (impl == kernels::Impl::scalar) continue;
        const auto& ops = kernels::get(impl);
        CAPTURE(kernels::impl_name(impl));

        for (std::size_t n : kSizes) {
            const auto af = testutil::random_f32(rng, n);
            const auto bf = testutil::random_f32(rng, n);
            const auto ad = testutil::random_f64(rng, n);
            const auto bd = testutil::random_f64(rng, n);
            const double tol = 1e-13 * (1.0 + static_cast<double>(n));

            double ab1, aa1, bb1, ab2, aa2, bb2;
            scalar.dot3_f32(af.data(), bf.data(), n, ab1, aa1, bb1);
            ops.dot3_f32(af.data(), bf.data(), n, ab2, aa2, bb2);
            CHECK(std::abs(ab2 - ab1) <= tol);
            CHECK(std::abs(aa2 - aa1) <= tol);
            CHECK(std::abs(bb2 - bb1) <= tol);

            scalar.dot3_f64(ad.data(), bd.data(), n, ab1, aa1, bb1);
            ops.dot3_f64(ad.data(), bd.data(), n, ab2, aa2, bb2);
            CHECK(std::abs(ab2 - ab1) <= tol);
            CHECK(std::abs(aa2 - aa1) <= tol);
            CHECK(std::abs(bb2 - bb1) <= tol);

            CHECK(std::abs(ops.dot_f64(ad.data(), bd.data(), n) -
                           scalar.dot_f64(ad.data(), bd.data(), n)) <= tol);
            CHECK(std::abs(ops.sqdist_f64(ad.data(), bd.data(), n) -
                           scalar.sqdist_f64(ad.data(), bd.data(), n)) <= tol);

            auto acc1 = testutil::random_f64(rng, n);
            auto acc2 = acc1;
            scalar.axpy_f32_acc(acc1.data(), af.data(), n, 0.37);
            ops.axpy_f32_acc(acc2.data(), af.data(), n, 0.37);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(acc2[i] - acc1[i]) <= 1e-15);
            }

            auto acc3 = testutil::random_f64(rng, n);
            auto acc4 = acc3;
            scalar.axpy_f64(acc3.data(), ad.data(), n, -1.25);
            ops.axpy_f64(acc4.data(), ad.data(), n, -1.25);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(acc4[i] - acc3[i]) <= 1e-15);
            }
        }
    }
}

TEST_CASE("dot3 against a plain loop oracle") {
    std::mt19937_64 rng(7);
    const auto a = testutil::random_f32(rng, 513);
    const auto b = testutil::random_f32(rng, 513);
    double oab = 0, oaa = 0, obb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        oab += double(a[i]) * double(b[i]);
        oaa += double(a[i]) * double(a[i]);
        obb += double(b[i]) * double(b[i]);
    }
    double ab, aa, bb;
    kernels::active().dot3_f32(a.data(), b.data(), a.size(), ab, aa, bb);
    CHECK(std::abs(ab - oab) <= 1e-12);
    CHECK(std::abs(aa - oaa) <= 1e-12);
    CHECK(std::abs(bb - obb) <= 1e-12);
}

TEST_CASE("force() switches the active variant and rejects unsupported ones") {
    const auto original = kernels::active_impl();
    kernels::force(kernels::Impl::scalar);
    CHECK(kernels::active_impl() == kernels::Impl::scalar);
    kernels::force(original);
#if !defined(__aarch64__)
    CHECK_THROWS_AS(kernels::force(kernels::Impl::neon), std::invalid_argument);
#endif
}
