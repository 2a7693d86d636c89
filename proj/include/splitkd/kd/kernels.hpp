#pragma once

#include <cstddef>

namespace splitkd::kd {

struct KlSum {
    double sum = 0.0;
    // true when some p[i] > 0 has q[i] <= 0; sum is then meaningless
    bool support_violation = false;
};

/// Vectorizable primitives behind the distillation math. The scalar table is
/// the reference; SIMD tables must match it within the equivalence-test
/// tolerances (elementwise ops bit-identical, exp/log based ops to ~1e-11).
struct KernelTable {
    const char* name = "";

    // max over x[0..n), n >= 1
    double (*reduce_max)(const double* x, std::size_t n) = nullptr;

    // out[i] = exp((x[i] - shift) * inv_t); returns sum of out
    double (*exp_shift_scale)(const double* x, std::size_t n, double shift,
                              double inv_t, double* out) = nullptr;

    // x[i] *= s
    void (*scale_inplace)(double* x, std::size_t n, double s) = nullptr;

    // sum of p[i] * ln(p[i] / q[i]) with 0 * ln(0/q) = 0
    KlSum (*kl_sum)(const double* p, const double* q, std::size_t n) = nullptr;

    // out[i] = a * (x[i] - y[i]) + b * (u[i] - v[i])
    void (*blend_diff)(double a, const double* x, const double* y, double b,
                       const double* u, const double* v, double* out,
                       std::size_t n) = nullptr;
};

const KernelTable& scalar_kernels();

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif

bool avx2_available();

/// Table used by the numerics layer; defaults to the best supported variant.
const KernelTable& active_kernels();
void set_active_kernels(const KernelTable& table);

}  // namespace splitkd::kd
