#pragma once

#include <array>
#include <cstdint>

namespace confined::simd {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
// Stateless: output is a pure function of (counter, key), which makes
// parallel streams reproducible by construction.
struct Philox4x32 {
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += kW0;
            k[1] += kW1;
        }
        return c;
    }
};

// Domain tags keep independent draw purposes on disjoint counter ranges.
enum : std::uint32_t {
    kTagEmNoise = 0x10,
    kTagInit = 0x20,
    kTagMh = 0x30,
    kTagTest = 0xF0,
};

// Batch kernels. `slot0` is the global index of the first value; results
// do not depend on how a range is split across calls.
struct Kernels {
    const char* name;
    // standard normals for slots [slot0, slot0+n)
    void (*normals)(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                    std::uint32_t tag, std::uint32_t slot0, int n, double* out);
    // uniforms in [0,1) for slots [slot0, slot0+n)
    void (*uniforms)(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                     std::uint32_t tag, std::uint32_t slot0, int n, double* out);
    // x[i] = boundary(x[i] + drift_dt[i] + s*z[i]); drift_dt may be null.
    // bc: 0 = free, 1 = specular reflection into [lo,hi], 2 = periodic wrap
    void (*em_axis)(double* x, const double* drift_dt, const double* z, int n,
                    double s, double lo, double hi, int bc);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr if unsupported on this CPU/build

// Runtime selection: AVX2 when the CPU supports it, unless overridden by
// the CONFINED_SIMD environment variable (scalar | avx2 | auto).
const Kernels& active_kernels();

// Sequential convenience stream over the uniforms kernel (used by the
// Metropolis sampler and rejection sampling, where draws are consumed
// one at a time).
class UniformStream {
  public:
    UniformStream(std::uint64_t seed, std::uint32_t stream, std::uint32_t tag)
        : seed_(seed), stream_(stream), tag_(tag) {}

    double next() {
        if (pos_ == kBuf) {
            refill();
            pos_ = 0;
        }
        return buf_[pos_++];
    }

  private:
    static constexpr int kBuf = 256;
    void refill();
    std::uint64_t seed_;
    std::uint32_t stream_, tag_;
    std::uint32_t step_ = 0;
    int pos_ = kBuf;
    double buf_[kBuf];
};

}  // namespace confined::simd
