// Shared kernel bodies, instantiated once per lane type. Each element's
// value depends only on its own lane, so the scalar and AVX2 builds are
// bit-identical (these TUs are compiled with -ffp-contract=off).
#pragma once

#include "confined/simd/kernels.hpp"
#include "confined/simd/simd.hpp"

namespace confined::simd::detail {

// 53-bit uniform in [0,1) from two 32-bit words (exact integer build-up,
// identical in scalar and vector arithmetic).
constexpr double kScale53 = 1.0 / 9007199254740992.0;  // 2^-53

template <class V>
inline void normals_from_words(V a_hi, V a_lo, V b_hi, V b_lo, V* z_even, V* z_odd) {
    const V one(1.0);
    V u1 = one - (a_hi * V(67108864.0) + a_lo) * V(kScale53);  // (0,1]
    V u2 = (b_hi * V(67108864.0) + b_lo) * V(kScale53);        // [0,1)
    V r = V::sqrt(V(-2.0) * log_unit(u1));
    V s, c;
    sincos_2pi(u2, s, c);
    *z_even = r * c;
    *z_odd = r * s;
}

template <class V>
inline void em_axis_body(double* x, const double* drift_dt, const double* z, int n,
                         double s, double lo, double hi, int bc) {
    const V vs(s), vlo(lo), vw(hi - lo);
    int i = 0;
    for (; i + V::width <= n; i += V::width) {
        V xi = V::load(x + i);
        V zi = V::load(z + i);
        xi = xi + vs * zi;
        if (drift_dt) xi = xi + V::load(drift_dt + i);
        if (bc == 1)
            xi = fold_reflect(xi, vlo, vw);
        else if (bc == 2)
            xi = fold_wrap(xi, vlo, vw);
        xi.store(x + i);
    }
    for (; i < n; ++i) {
        VecScalar xi{x[i]};
        xi = xi + VecScalar{s} * VecScalar{z[i]};
        if (drift_dt) xi = xi + VecScalar{drift_dt[i]};
        if (bc == 1)
            xi = fold_reflect(xi, VecScalar{lo}, VecScalar{hi - lo});
        else if (bc == 2)
            xi = fold_wrap(xi, VecScalar{lo}, VecScalar{hi - lo});
        x[i] = xi.v;
    }
}

// Scalar reference paths for the counter-based draws; the AVX2 TU overrides
// the block generation but reuses these for remainders.
inline void scalar_normal_pair(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                               std::uint32_t tag, std::uint32_t block, double* z2) {
    const auto w = Philox4x32::block(
        {block, step, stream, tag},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    VecScalar ze, zo;
    normals_from_words<VecScalar>(VecScalar{static_cast<double>(w[0] >> 5)},
                                  VecScalar{static_cast<double>(w[1] >> 6)},
                                  VecScalar{static_cast<double>(w[2] >> 5)},
                                  VecScalar{static_cast<double>(w[3] >> 6)}, &ze, &zo);
    z2[0] = ze.v;
    z2[1] = zo.v;
}

inline void scalar_uniform_pair(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                                std::uint32_t tag, std::uint32_t block, double* u2) {
    const auto w = Philox4x32::block(
        {block, step, stream, tag},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    u2[0] = (static_cast<double>(w[0] >> 5) * 67108864.0 + static_cast<double>(w[1] >> 6)) * kScale53;
    u2[1] = (static_cast<double>(w[2] >> 5) * 67108864.0 + static_cast<double>(w[3] >> 6)) * kScale53;
}

inline void scalar_normals(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                           std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    std::uint32_t slot = slot0;
    int i = 0;
    double z2[2];
    while (i < n) {
        const std::uint32_t block = slot >> 1;
        scalar_normal_pair(seed, stream, step, tag, block, z2);
        for (int lane = slot & 1; lane < 2 && i < n; ++lane, ++i, ++slot) out[i] = z2[lane];
    }
}

inline void scalar_uniforms(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                            std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    std::uint32_t slot = slot0;
    int i = 0;
    double u2[2];
    while (i < n) {
        const std::uint32_t block = slot >> 1;
        scalar_uniform_pair(seed, stream, step, tag, block, u2);
        for (int lane = slot & 1; lane < 2 && i < n; ++lane, ++i, ++slot) out[i] = u2[lane];
    }
}

}  // namespace confined::simd::detail
