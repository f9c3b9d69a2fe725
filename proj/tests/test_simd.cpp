#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "confined/simd/kernels.hpp"
#include "confined/simd/simd.hpp"

#include <cmath>
#include <cstring>
#include <vector>

using namespace confined::simd;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Random123 reference vectors
    auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);

    out = Philox4x32::block({1, 2, 3, 4}, {5, 6});
    CHECK(out[0] == 0xc0c839bcu);
    CHECK(out[1] == 0x889c87c5u);
    CHECK(out[2] == 0x61986739u);
    CHECK(out[3] == 0x2d4623d0u);
}

TEST_CASE("shared log and sincos polynomials match libm") {
    for (int k = 1; k <= 4000; ++k) {
        const double u = k / 4000.0;
        const double got = log_unit(VecScalar{u}).v;
        CHECK(std::abs(got - std::log(u)) < 1e-11 * std::max(1.0, std::abs(std::log(u))));
        VecScalar s, c;
        sincos_2pi(VecScalar{u * 0.99999}, s, c);
        CHECK(std::abs(s.v - std::sin(2 * M_PI * u * 0.99999)) < 2e-13);
        CHECK(std::abs(c.v - std::cos(2 * M_PI * u * 0.99999)) < 2e-13);
    }
}

TEST_CASE("scalar and AVX2 lanes are bit-identical") {
    const Kernels* avx2 = avx2_kernels();
    if (!avx2) {
        MESSAGE("AVX2 not available on this host; lane-equivalence skipped");
        return;
    }
    const Kernels& ref = scalar_kernels();
    std::vector<double> a(1003), b(1003);

    for (std::uint32_t slot0 : {0u, 1u, 7u, 16u}) {
        ref.normals(0x12345678u, 3, 42, kTagTest, slot0, 1003 - slot0, a.data());
        avx2->normals(0x12345678u, 3, 42, kTagTest, slot0, 1003 - slot0, b.data());
        CHECK(std::memcmp(a.data(), b.data(), (1003 - slot0) * sizeof(double)) == 0);

        ref.uniforms(0xdeadbeefcafeULL, 9, 7, kTagTest, slot0, 1003 - slot0, a.data());
        avx2->uniforms(0xdeadbeefcafeULL, 9, 7, kTagTest, slot0, 1003 - slot0, b.data());
        CHECK(std::memcmp(a.data(), b.data(), (1003 - slot0) * sizeof(double)) == 0);
    }

    // em update + fold
    std::vector<double> x0(517), z(517), drift(517), xa(517), xb(517);
    ref.uniforms(11, 0, 0, kTagTest, 0, 517, x0.data());
    ref.normals(11, 0, 1, kTagTest, 0, 517, z.data());
    for (int i = 0; i < 517; ++i) {
        x0[i] = (x0[i] - 0.5) * 3.0;  // deliberately partly outside the walls
        drift[i] = 0.01 * z[(i + 5) % 517];
    }
    for (int bc : {0, 1, 2}) {
        xa = x0;
        xb = x0;
        ref.em_axis(xa.data(), drift.data(), z.data(), 517, 0.02, -0.5, 0.5, bc);
        avx2->em_axis(xb.data(), drift.data(), z.data(), 517, 0.02, -0.5, 0.5, bc);
        CHECK(std::memcmp(xa.data(), xb.data(), 517 * sizeof(double)) == 0);
    }
}

TEST_CASE("slot indexing is decomposition independent") {
    const Kernels& k = active_kernels();
    std::vector<double> whole(301), parts(301);
    k.normals(77, 1, 2, kTagTest, 0, 301, whole.data());
    int at = 0;
    for (int chunk : {1, 2, 3, 17, 64, 100, 114}) {
        k.normals(77, 1, 2, kTagTest, at, chunk, parts.data() + at);
        at += chunk;
    }
    REQUIRE(at == 301);
    CHECK(std::memcmp(whole.data(), parts.data(), 301 * sizeof(double)) == 0);
}

TEST_CASE("normal moments (1e6 draws, 5-sigma)") {
    const int n = 1000000;
    std::vector<double> z(n);
    active_kernels().normals(2024, 0, 0, kTagTest, 0, n, z.data());
    double m1 = 0, m2 = 0, m4 = 0;
    for (double v : z) {
        m1 += v;
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 5.0 / std::sqrt(static_cast<double>(n)));            // se(mean)=1/sqrt n
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));                     // se(var)
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));                    // se(4th moment)
}

TEST_CASE("uniforms live in [0,1) and fill the interval") {
    const int n = 100000;
    std::vector<double> u(n);
    active_kernels().uniforms(5, 0, 0, kTagTest, 0, n, u.data());
    double mn = 1e300, mx = -1e300, mean = 0;
    for (double v : u) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        mean += v;
    }
    mean /= n;
    CHECK(mn >= 0.0);
    CHECK(mx < 1.0);
    CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("reflective fold is the iterated specular map") {
    auto iterated = [](double x, double lo, double hi) {
        for (int guard = 0; guard < 10000; ++guard) {
            if (x > hi)
                x = 2 * hi - x;
            else if (x < lo)
                x = 2 * lo - x;
            else
                return x;
        }
        return x;
    };
    std::vector<double> u(1000);
    active_kernels().uniforms(3, 0, 0, kTagTest, 0, 1000, u.data());
    for (double v : u) {
        const double x = (v - 0.5) * 40.0;  // excursions many widths wide
        const double lo = -0.05, hi = 0.05;
        const double got = fold_reflect(VecScalar{x}, VecScalar{lo}, VecScalar{hi - lo}).v;
        const double want = iterated(x, lo, hi);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= lo);
        CHECK(got <= hi);
    }
}
