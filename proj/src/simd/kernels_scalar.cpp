#include "kernels_body.hpp"

namespace confined::simd {

namespace {

void normals_impl(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                  std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    detail::scalar_normals(seed, stream, step, tag, slot0, n, out);
}

void uniforms_impl(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                   std::uint32_t tag, std::uint32_t slot0, int n, double* out) {
    detail::scalar_uniforms(seed, stream, step, tag, slot0, n, out);
}

void em_axis_impl(double* x, const double* drift_dt, const double* z, int n, double s,
                  double lo, double hi, int bc) {
    detail::em_axis_body<VecScalar>(x, drift_dt, z, n, s, lo, hi, bc);
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", &normals_impl, &uniforms_impl, &em_axis_impl};
    return k;
}

void UniformStream::refill() {
    active_kernels().uniforms(seed_, stream_, step_, tag_, 0, kBuf, buf_);
    ++step_;
}

}  // namespace confined::simd
