#include "splitkd/kd/kernels.hpp"

#include <cmath>

namespace splitkd::kd {
namespace scalar {

double reduce_max(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m;
}

double exp_shift_scale(const double* x, std::size_t n, double shift, double inv_t,
                       double* out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp((x[i] - shift) * inv_t);
        sum += out[i];
    }
    return sum;
}

void scale_inplace(double* x, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

KlSum kl_sum(const double* p, const double* q, std::size_t n) {
    KlSum r;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] <= 0.0) continue;  // 0 * ln(0/q) contributes nothing
        if (q[i] <= 0.0) {
            r.support_violation = true;
            return r;
        }
        r.sum += p[i] * std::log(p[i] / q[i]);
    }
    return r;
}

void blend_diff(double a, const double* x, const double* y, double b, const double* u,
                const double* v, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a * (x[i] - y[i]) + b * (u[i] - v[i]);
    }
}

}  // namespace scalar

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar",          scalar::reduce_max, scalar::exp_shift_scale,
        scalar::scale_inplace, scalar::kl_sum,     scalar::blend_diff,
    };
    return table;
}

}  // namespace splitkd::kd
