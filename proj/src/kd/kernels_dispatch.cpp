#include "splitkd/kd/kernels.hpp"

namespace splitkd::kd {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

const KernelTable* best_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &avx2_kernels();
#endif
    return &scalar_kernels();
}

const KernelTable*& active_slot() {
    static const KernelTable* active = best_supported();
    return active;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot(); }

void set_active_kernels(const KernelTable& table) { active_slot() = &table; }

}  // namespace splitkd::kd
