#include <atomic>
#include <cstdlib>
#include <cstring>

#include "polarqc/kernels.hpp"

#if defined(POLARQC_HAVE_AVX2)
namespace polarqc::kernels::avx2 {
void cmul(cplx* y, const cplx* x, std::size_t n);
double norm2(const cplx* x, std::size_t n);
cplx cdot(const cplx* a, const cplx* b, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace polarqc::kernels::avx2
#endif

namespace polarqc::kernels {
namespace {

std::atomic<bool> g_force_scalar{false};

bool env_forces_scalar() {
    const char* v = std::getenv("POLARQC_FORCE_SCALAR");
    return v != nullptr && *v != '\0' && std::strcmp(v, "0") != 0;
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(POLARQC_HAVE_AVX2)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    static const KernelTable table{"avx2", avx2::cmul, avx2::norm2, avx2::cdot, avx2::caxpy};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const bool env_scalar = env_forces_scalar();
    if (!g_force_scalar.load(std::memory_order_relaxed) && !env_scalar) {
        if (const KernelTable* t = avx2_table()) return *t;
    }
    return scalar_table();
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

}  // namespace polarqc::kernels
