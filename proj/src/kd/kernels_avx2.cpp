// AVX2 variants of the distillation kernels. Elementwise max/scale/blend use
// the same operation order as the scalar reference and no FMA, so they are
// bit-identical; exp and log use custom polynomials accurate to a few ulp,
// so those paths agree with the scalar ones to ~1e-15 relative.
#if defined(__x86_64__) || defined(_M_X64)

#include "splitkd/kd/kernels.hpp"

#include <immintrin.h>

#include <cfloat>
#include <cmath>
#include <cstdint>

namespace splitkd::kd {
namespace avx2 {
namespace {

// Cody-Waite split of ln 2; hi has enough trailing zero bits that n * hi is
// exact for the |n| <= 1077 produced by the clamped exp argument.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2E = 1.4426950408889634074;
constexpr double kSqrt2 = 1.4142135623730951;

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

// exp(z) per lane via range reduction z = n*ln2 + r and a degree-13 Taylor
// polynomial on |r| <= ln2/2; 2^n applied as two exact power-of-two factors
// so results stay correct into the gradual-underflow range.
inline __m256d exp_pd(__m256d z) {
    const __m256d z_min = _mm256_set1_pd(-746.0);
    const __m256d z_max = _mm256_set1_pd(710.0);
    z = _mm256_min_pd(_mm256_max_pd(z, z_min), z_max);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(z, _mm256_set1_pd(kLog2E)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(z, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Hi)));
    r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(kLn2Lo)));

    __m256d q = _mm256_set1_pd(1.6059043836821613e-10);  // 1/13!
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(2.0876756987868099e-09));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(2.5052108385441720e-08));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(2.7557319223985888e-07));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(2.7557319223985893e-06));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(2.4801587301587302e-05));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(1.9841269841269841e-04));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(1.3888888888888889e-03));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(8.3333333333333332e-03));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(4.1666666666666664e-02));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(1.6666666666666666e-01));
    q = _mm256_add_pd(_mm256_mul_pd(q, r), _mm256_set1_pd(0.5));
    __m256d poly = _mm256_mul_pd(_mm256_mul_pd(q, r), r);
    poly = _mm256_add_pd(poly, _mm256_add_pd(r, _mm256_set1_pd(1.0)));

    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m128i hi32 = _mm_srai_epi32(n32, 1);
    __m128i lo32 = _mm_sub_epi32(n32, hi32);
    const __m256i bias = _mm256_set1_epi64x(1023);
    __m256d pow_hi = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(hi32), bias), 52));
    __m256d pow_lo = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(lo32), bias), 52));
    return _mm256_mul_pd(_mm256_mul_pd(poly, pow_hi), pow_lo);
}

// ln(t) per lane for normal positive t: decompose t = m * 2^e with
// m in [sqrt(1/2), sqrt(2)), then ln m = 2 * atanh((m-1)/(m+1)) via its
// odd series through s^21.
inline __m256d log_pd(__m256d t) {
    const __m256i bits = _mm256_castpd_si256(t);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_exp = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_exp));

    __m256i e64 = _mm256_srli_epi64(bits, 52);
    __m128i e_lo = _mm_shuffle_epi32(_mm256_castsi256_si128(e64), _MM_SHUFFLE(3, 1, 2, 0));
    __m128i e_hi = _mm_shuffle_epi32(_mm256_extracti128_si256(e64, 1), _MM_SHUFFLE(3, 1, 2, 0));
    __m128i e32 = _mm_unpacklo_epi64(e_lo, e_hi);
    __m256d e = _mm256_sub_pd(_mm256_cvtepi32_pd(e32), _mm256_set1_pd(1023.0));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d s2 = _mm256_mul_pd(s, s);

    __m256d w = _mm256_set1_pd(4.7619047619047616e-02);  // 1/21
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(5.2631578947368418e-02));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(5.8823529411764705e-02));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(6.6666666666666666e-02));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(7.6923076923076927e-02));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(9.0909090909090912e-02));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(1.1111111111111110e-01));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(1.4285714285714285e-01));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(2.0e-01));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), _mm256_set1_pd(3.3333333333333331e-01));
    w = _mm256_add_pd(_mm256_mul_pd(w, s2), one);
    const __m256d ln_m = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), w);

    __m256d result = _mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo));
    result = _mm256_add_pd(result, ln_m);
    return _mm256_add_pd(result, _mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)));
}

}  // namespace

double reduce_max(const double* x, std::size_t n) {
    if (n < 4) {
        double m = x[0];
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] > m) m = x[i];
        }
        return m;
    }
    __m256d m_v = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) m_v = _mm256_max_pd(m_v, _mm256_loadu_pd(x + i));
    double m = hmax(m_v);
    for (; i < n; ++i) {
        if (x[i] > m) m = x[i];
    }
    return m;
}

double exp_shift_scale(const double* x, std::size_t n, double shift, double inv_t,
                       double* out) {
    const __m256d shift_v = _mm256_set1_pd(shift);
    const __m256d inv_t_v = _mm256_set1_pd(inv_t);
    __m256d sum_v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d z =
            _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), shift_v), inv_t_v);
        const __m256d e = exp_pd(z);
        _mm256_storeu_pd(out + i, e);
        sum_v = _mm256_add_pd(sum_v, e);
    }
    double sum = hsum(sum_v);
    for (; i < n; ++i) {
        out[i] = std::exp((x[i] - shift) * inv_t);
        sum += out[i];
    }
    return sum;
}

void scale_inplace(double* x, std::size_t n, double s) {
    const __m256d s_v = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), s_v));
    }
    for (; i < n; ++i) x[i] *= s;
}

KlSum kl_sum(const double* p, const double* q, std::size_t n) {
    KlSum r;
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d tiny = _mm256_set1_pd(DBL_MIN);
    const __m256d huge = _mm256_set1_pd(DBL_MAX);
    __m256d sum_v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p_v = _mm256_loadu_pd(p + i);
        const __m256d q_v = _mm256_loadu_pd(q + i);
        const __m256d pos = _mm256_cmp_pd(p_v, zero, _CMP_GT_OQ);
        const __m256d viol = _mm256_and_pd(pos, _mm256_cmp_pd(q_v, zero, _CMP_LE_OQ));
        if (_mm256_movemask_pd(viol) != 0) {
            r.support_violation = true;
            return r;
        }
        // inactive lanes may hold 0/0; park them at ratio 1 (ln = 0)
        const __m256d t = _mm256_blendv_pd(one, _mm256_div_pd(p_v, q_v), pos);
        const __m256d t_normal = _mm256_and_pd(_mm256_cmp_pd(t, tiny, _CMP_GE_OQ),
                                               _mm256_cmp_pd(t, huge, _CMP_LE_OQ));
        if (_mm256_movemask_pd(t_normal) != 0xF) {
            // subnormal or overflowing ratio: the polynomial path would lose
            // the exponent, take the libm scalar route for this block
            double block = 0.0;
            for (std::size_t k = i; k < i + 4; ++k) {
                if (p[k] <= 0.0) continue;
                block += p[k] * std::log(p[k] / q[k]);
            }
            sum_v = _mm256_add_pd(sum_v, _mm256_set_pd(0.0, 0.0, 0.0, block));
            continue;
        }
        const __m256d contrib = _mm256_and_pd(_mm256_mul_pd(p_v, log_pd(t)), pos);
        sum_v = _mm256_add_pd(sum_v, contrib);
    }
    r.sum = hsum(sum_v);
    for (; i < n; ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) {
            r.support_violation = true;
            r.sum = 0.0;
            return r;
        }
        r.sum += p[i] * std::log(p[i] / q[i]);
    }
    return r;
}

void blend_diff(double a, const double* x, const double* y, double b, const double* u,
                const double* v, double* out, std::size_t n) {
    const __m256d a_v = _mm256_set1_pd(a);
    const __m256d b_v = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xy = _mm256_mul_pd(a_v, _mm256_sub_pd(_mm256_loadu_pd(x + i),
                                                            _mm256_loadu_pd(y + i)));
        const __m256d uv = _mm256_mul_pd(b_v, _mm256_sub_pd(_mm256_loadu_pd(u + i),
                                                            _mm256_loadu_pd(v + i)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(xy, uv));
    }
    for (; i < n; ++i) {
        out[i] = a * (x[i] - y[i]) + b * (u[i] - v[i]);
    }
}

}  // namespace avx2

const KernelTable& avx2_kernels() {
    static const KernelTable table{
        "avx2",          avx2::reduce_max, avx2::exp_shift_scale,
        avx2::scale_inplace, avx2::kl_sum,     avx2::blend_diff,
    };
    return table;
}

}  // namespace splitkd::kd

#endif  // x86_64
