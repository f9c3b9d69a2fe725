#include "confined/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace confined::simd {

const Kernels* avx2_kernels_compiled();  // defined in kernels_avx2.cpp

const Kernels* avx2_kernels() {
#if defined(__x86_64__) || defined(_M_X64)
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    return avx2_kernels_compiled();
#else
    return nullptr;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* selected = [] {
        const char* env = std::getenv("CONFINED_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        const Kernels* avx2 = avx2_kernels();
        if (env && std::strcmp(env, "avx2") == 0 && avx2) return avx2;
        if (env && std::strcmp(env, "avx2") == 0) return &scalar_kernels();
        return avx2 ? avx2 : &scalar_kernels();
    }();
    return *selected;
}

}  // namespace confined::simd
