// AVX2 lane: Philox blocks 8-wide in u32 SoA, Box-Muller 4-wide.
#if defined(__x86_64__) || defined(_M_X64)

#include "kernels_body.hpp"

#include <immintrin.h>

namespace confined::simd {

namespace {

struct HiLo {
    __m256i hi, lo;
};

// 32x32 -> 64 multiply on all eight u32 lanes
inline HiLo mulhilo8(__m256i a, std::uint32_t m) {
    const __m256i vm = _mm256_set1_epi32(static_cast<int>(m));
    const __m256i even = _mm256_mul_epu32(a, vm);
    const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), vm);
    HiLo r;
    r.lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
    r.hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
    return r;
}

// eight Philox4x32-10 blocks with counters {block0+lane, step, stream, tag}
inline void philox8(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                    std::uint32_t tag, std::uint32_t block0, __m256i out[4]) {
    __m256i c0 = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(block0)),
                                  _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));
    __m256i c1 = _mm256_set1_epi32(static_cast<int>(step));
    __m256i c2 = _mm256_set1_epi32(static_cast<int>(stream));
    __m256i c3 = _mm256_set1_epi32(static_cast<int>(tag));
    __m256i k0 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed)));
    __m256i k1 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(seed >> 32)));
    const __m256i w0 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kW0));
    const __m256i w1 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kW1));
    for (int round = 0; round < 10; ++round) {
        const HiLo p0 = mulhilo8(c0, Philox4x32::kM0);
        const HiLo p1 = mulhilo8(c2, Philox4x32::kM1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(p1.hi, c1), k0);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(p0.hi, c3), k1);
        c0 = n0;
        c1 = p1.lo;
        c2 = n2;
        c3 = p0.lo;
        k0 = _mm256_add_epi32(k0, w0);
        k1 = _mm256_add_epi32(k1, w1);
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
}

// exact conversion of eight shifted words to doubles, as two 4-lane vectors
inline void words_to_pd(__m256i w, int shift, __m256d* lo4, __m256d* hi4) {
    const __m256i s = _mm256_srli_epi32(w, shift);
    *lo4 = _mm256_cvtepi32_pd(_mm256_castsi256_si128(s));
    *hi4 = _mm256_cvtepi32_pd(_mm256_extracti128_si256(s, 1));
}

// 16 normals from blocks [block0, block0+8)
inline void normals16(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                      std::uint32_t tag, std::uint32_t block0, double* out) {
    __m256i w[4];
    philox8(seed, stream, step, tag, block0, w);
    __m256d a_hi[2], a_lo[2], b_hi[2], b_lo[2];
    words_to_pd(w[0], 5, &a_hi[0], &a_hi[1]);
    words_to_pd(w[1], 6, &a_lo[0], &a_lo[1]);
    words_to_pd(w[2], 5, &b_hi[0], &b_hi[1]);
    words_to_pd(w[3], 6, &b_lo[0], &b_lo[1]);
    for (int g = 0; g < 2; ++g) {
        VecAvx2 ze, zo;
        detail::normals_from_words<VecAvx2>(VecAvx2{a_hi[g]}, VecAvx2{a_lo[g]},
                                            VecAvx2{b_hi[g]}, VecAvx2{b_lo[g]}, &ze, &zo);
        alignas(32) double e[4], o[4];
        ze.store(e);
        zo.store(o);
        double* dst = out + 8 * g;
        for (int lane = 0; lane < 4; ++lane) {
            dst[2 * lane] = e[lane];
            dst[2 * lane + 1] = o[lane];
        }
    }
}

void normals_impl(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                  std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    std::uint32_t slot = slot0;
    int i = 0;
    // leading partial block
    while (i < n && (slot & 1u)) {
        double z2[2];
        detail::scalar_normal_pair(seed, stream, step, tag, slot >> 1, z2);
        out[i++] = z2[1];
        ++slot;
    }
    while (n - i >= 16) {
        normals16(seed, stream, step, tag, slot >> 1, out + i);
        i += 16;
        slot += 16;
    }
    detail::scalar_normals(seed, stream, step, tag, slot, n - i, out + i);
}

// 16 uniforms from blocks [block0, block0+8)
inline void uniforms16(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                       std::uint32_t tag, std::uint32_t block0, double* out) {
    __m256i w[4];
    philox8(seed, stream, step, tag, block0, w);
    __m256d a_hi[2], a_lo[2], b_hi[2], b_lo[2];
    words_to_pd(w[0], 5, &a_hi[0], &a_hi[1]);
    words_to_pd(w[1], 6, &a_lo[0], &a_lo[1]);
    words_to_pd(w[2], 5, &b_hi[0], &b_hi[1]);
    words_to_pd(w[3], 6, &b_lo[0], &b_lo[1]);
    const VecAvx2 scale(detail::kScale53), m26(67108864.0);
    for (int g = 0; g < 2; ++g) {
        VecAvx2 ua = (VecAvx2{a_hi[g]} * m26 + VecAvx2{a_lo[g]}) * scale;
        VecAvx2 ub = (VecAvx2{b_hi[g]} * m26 + VecAvx2{b_lo[g]}) * scale;
        alignas(32) double a[4], b[4];
        ua.store(a);
        ub.store(b);
        double* dst = out + 8 * g;
        for (int lane = 0; lane < 4; ++lane) {
            dst[2 * lane] = a[lane];
            dst[2 * lane + 1] = b[lane];
        }
    }
}

void uniforms_impl(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                   std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    std::uint32_t slot = slot0;
    int i = 0;
    while (i < n && (slot & 1u)) {
        double u2[2];
        detail::scalar_uniform_pair(seed, stream, step, tag, slot >> 1, u2);
        out[i++] = u2[1];
        ++slot;
    }
    while (n - i >= 16) {
        uniforms16(seed, stream, step, tag, slot >> 1, out + i);
        i += 16;
        slot += 16;
    }
    detail::scalar_uniforms(seed, stream, step, tag, slot, n - i, out + i);
}

void em_axis_impl(double* x, const double* drift_dt, const double* z, int n, double s,
                  double lo, double hi, int bc) {
    detail::em_axis_body<VecAvx2>(x, drift_dt, z, n, s, lo, hi, bc);
}

}  // namespace

const Kernels* avx2_kernels_compiled() {
    static const Kernels k{"avx2", &normals_impl, &uniforms_impl, &em_axis_impl};
    return &k;
}

}  // namespace confined::simd

#else

namespace confined::simd {
struct Kernels;
const Kernels* avx2_kernels_compiled() { return nullptr; }
}  // namespace confined::simd

#endif
