#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace confined::simd {

// Batch-of-doubles abstraction. Kernels are written once against this
// interface and instantiated for the scalar lane and for AVX2; both
// perform the identical operation sequence per element, so results are
// bit-identical across lanes (no FMA contraction in these TUs).

struct VecScalar {
    static constexpr int width = 1;
    double v;

    VecScalar() = default;
    explicit VecScalar(double x) : v(x) {}
    static VecScalar load(const double* p) { return VecScalar{*p}; }
    void store(double* p) const { *p = v; }

    friend VecScalar operator+(VecScalar a, VecScalar b) { return VecScalar{a.v + b.v}; }
    friend VecScalar operator-(VecScalar a, VecScalar b) { return VecScalar{a.v - b.v}; }
    friend VecScalar operator*(VecScalar a, VecScalar b) { return VecScalar{a.v * b.v}; }
    friend VecScalar operator/(VecScalar a, VecScalar b) { return VecScalar{a.v / b.v}; }

    static VecScalar sqrt(VecScalar a) { return VecScalar{std::sqrt(a.v)}; }
    static VecScalar floor(VecScalar a) { return VecScalar{std::floor(a.v)}; }

    // mask is all-ones/all-zeros encoded in a VecScalar-compatible way
    struct Mask {
        bool m;
    };
    static Mask cmp_gt(VecScalar a, VecScalar b) { return Mask{a.v > b.v}; }
    static Mask cmp_ge(VecScalar a, VecScalar b) { return Mask{a.v >= b.v}; }
    static Mask cmp_eq(VecScalar a, VecScalar b) { return Mask{a.v == b.v}; }
    static VecScalar select(Mask m, VecScalar a, VecScalar b) { return m.m ? a : b; }

    // raw IEEE-754 bit manipulation (for exponent/mantissa splitting)
    static VecScalar from_bits(std::uint64_t bits) {
        double d;
        std::memcpy(&d, &bits, 8);
        return VecScalar{d};
    }
    std::uint64_t bits() const {
        std::uint64_t b;
        std::memcpy(&b, &v, 8);
        return b;
    }
    static VecScalar bits_and_or(VecScalar a, std::uint64_t mask, std::uint64_t orv) {
        return from_bits((a.bits() & mask) | orv);
    }
    // exponent field (biased), as a double
    static VecScalar exponent_biased(VecScalar a) {
        return VecScalar{static_cast<double>((a.bits() >> 52) & 0x7FF)};
    }
};

#if defined(__AVX2__)

struct VecAvx2 {
    static constexpr int width = 4;
    __m256d v;

    VecAvx2() = default;
    explicit VecAvx2(double x) : v(_mm256_set1_pd(x)) {}
    explicit VecAvx2(__m256d x) : v(x) {}
    static VecAvx2 load(const double* p) { return VecAvx2{_mm256_loadu_pd(p)}; }
    void store(double* p) const { _mm256_storeu_pd(p, v); }

    friend VecAvx2 operator+(VecAvx2 a, VecAvx2 b) { return VecAvx2{_mm256_add_pd(a.v, b.v)}; }
    friend VecAvx2 operator-(VecAvx2 a, VecAvx2 b) { return VecAvx2{_mm256_sub_pd(a.v, b.v)}; }
    friend VecAvx2 operator*(VecAvx2 a, VecAvx2 b) { return VecAvx2{_mm256_mul_pd(a.v, b.v)}; }
    friend VecAvx2 operator/(VecAvx2 a, VecAvx2 b) { return VecAvx2{_mm256_div_pd(a.v, b.v)}; }

    static VecAvx2 sqrt(VecAvx2 a) { return VecAvx2{_mm256_sqrt_pd(a.v)}; }
    static VecAvx2 floor(VecAvx2 a) { return VecAvx2{_mm256_floor_pd(a.v)}; }

    struct Mask {
        __m256d m;
    };
    static Mask cmp_gt(VecAvx2 a, VecAvx2 b) { return Mask{_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
    static Mask cmp_ge(VecAvx2 a, VecAvx2 b) { return Mask{_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
    static Mask cmp_eq(VecAvx2 a, VecAvx2 b) { return Mask{_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }
    static VecAvx2 select(Mask m, VecAvx2 a, VecAvx2 b) {
        return VecAvx2{_mm256_blendv_pd(b.v, a.v, m.m)};
    }

    static VecAvx2 from_bits(std::uint64_t bits) {
        return VecAvx2{_mm256_castsi256_pd(_mm256_set1_epi64x(static_cast<long long>(bits)))};
    }
    static VecAvx2 bits_and_or(VecAvx2 a, std::uint64_t mask, std::uint64_t orv) {
        __m256i b = _mm256_castpd_si256(a.v);
        b = _mm256_and_si256(b, _mm256_set1_epi64x(static_cast<long long>(mask)));
        b = _mm256_or_si256(b, _mm256_set1_epi64x(static_cast<long long>(orv)));
        return VecAvx2{_mm256_castsi256_pd(b)};
    }
    static VecAvx2 exponent_biased(VecAvx2 a) {
        __m256i b = _mm256_castpd_si256(a.v);
        b = _mm256_srli_epi64(b, 52);
        b = _mm256_and_si256(b, _mm256_set1_epi64x(0x7FF));
        // values < 2^31: exact int32->double conversion via extracted lanes
        alignas(32) long long tmp[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), b);
        return VecAvx2{_mm256_set_pd(static_cast<double>(tmp[3]), static_cast<double>(tmp[2]),
                                     static_cast<double>(tmp[1]), static_cast<double>(tmp[0]))};
    }
};

#endif  // __AVX2__

// ---- shared elementary kernels (identical op order in every lane) ------

// log for u in (0, 1]: exponent/mantissa split + atanh series.
template <class V>
inline V log_unit(V u) {
    const V one(1.0), half(0.5);
    V e = V::exponent_biased(u) - V(1023.0);
    V m = V::bits_and_or(u, 0x000FFFFFFFFFFFFFull, 0x3FF0000000000000ull);  // [1,2)
    auto gt = V::cmp_gt(m, V(1.4142135623730951));
    m = V::select(gt, m * half, m);
    e = V::select(gt, e + one, e);
    V s = (m - one) / (m + one);
    V s2 = s * s;
    // 2*atanh(s) = 2s(1 + s^2/3 + s^4/5 + ...)
    V poly = V(1.0 / 15.0);
    poly = poly * s2 + V(1.0 / 13.0);
    poly = poly * s2 + V(1.0 / 11.0);
    poly = poly * s2 + V(1.0 / 9.0);
    poly = poly * s2 + V(1.0 / 7.0);
    poly = poly * s2 + V(1.0 / 5.0);
    poly = poly * s2 + V(1.0 / 3.0);
    poly = poly * s2 + one;
    V ln_m = (s + s) * poly;
    return e * V(0.6931471805599453) + ln_m;
}

// sin and cos of 2*pi*u for u in [0, 1).
template <class V>
inline void sincos_2pi(V u, V& s_out, V& c_out) {
    const V quarter(0.25);
    V q = V::floor(u * V(4.0) + V(0.5));  // 0..4
    V r = u - q * quarter;                // [-1/8, 1/8]
    V a = r * V(6.283185307179586);       // [-pi/4, pi/4]
    V a2 = a * a;

    V sp = V(-1.0 / 1307674368000.0);
    sp = sp * a2 + V(1.0 / 6227020800.0);
    sp = sp * a2 - V(1.0 / 39916800.0);
    sp = sp * a2 + V(1.0 / 362880.0);
    sp = sp * a2 - V(1.0 / 5040.0);
    sp = sp * a2 + V(1.0 / 120.0);
    sp = sp * a2 - V(1.0 / 6.0);
    sp = sp * a2 + V(1.0);
    V sa = a * sp;

    V cp = V(-1.0 / 87178291200.0);
    cp = cp * a2 + V(1.0 / 479001600.0);
    cp = cp * a2 - V(1.0 / 3628800.0);
    cp = cp * a2 + V(1.0 / 40320.0);
    cp = cp * a2 - V(1.0 / 720.0);
    cp = cp * a2 + V(1.0 / 24.0);
    cp = cp * a2 - V(0.5);
    cp = cp * a2 + V(1.0);
    V ca = cp;

    // rotate by q*pi/2 (q = 4 behaves as q = 0)
    const V zero(0.0), one(1.0), neg1(-1.0);
    auto is1 = V::cmp_eq(q, one);
    auto is2 = V::cmp_eq(q, V(2.0));
    auto is3 = V::cmp_eq(q, V(3.0));
    V cq = V::select(is1, zero, V::select(is2, neg1, V::select(is3, zero, one)));
    V sq = V::select(is1, one, V::select(is2, zero, V::select(is3, neg1, zero)));
    s_out = sa * cq + ca * sq;
    c_out = ca * cq - sa * sq;
}

// reflective fold of x into [lo, hi] (exact iterated specular reflection)
template <class V>
inline V fold_reflect(V x, V lo, V w) {
    V period = w + w;
    V y = x - lo;
    y = y - period * V::floor(y / period);  // [0, 2w)
    auto out = V::cmp_gt(y, w);
    y = V::select(out, period - y, y);
    return lo + y;
}

// periodic wrap of x into [lo, lo + w)
template <class V>
inline V fold_wrap(V x, V lo, V w) {
    V y = x - lo;
    y = y - w * V::floor(y / w);
    auto over = V::cmp_ge(y, w);  // rounding can land exactly on w
    y = V::select(over, y - w, y);
    return lo + y;
}

}  // namespace confined::simd
