#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "splitkd/kd/kernels.hpp"

using namespace splitkd::kd;

namespace {

// odd sizes on purpose: every vector width leaves a scalar tail
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 67};

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(1e-6, 1.0);
    std::vector<double> v(n);
    double sum = 0.0;
    for (double& x : v) {
        x = dist(rng);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

}  // namespace

TEST_CASE("kernel tables identify themselves") {
    CHECK(std::string(scalar_kernels().name) == "scalar");
    CHECK(std::string(active_kernels().name).size() > 0);
#if defined(__x86_64__) || defined(_M_X64)
    CHECK(std::string(avx2_kernels().name) == "avx2");
    if (avx2_available()) CHECK(std::string(active_kernels().name) == "avx2");
#endif
}

TEST_CASE("active table can be swapped and restored") {
    const KernelTable& before = active_kernels();
    set_active_kernels(scalar_kernels());
    CHECK(std::string(active_kernels().name) == "scalar");
    set_active_kernels(before);
    CHECK(std::string(active_kernels().name) == std::string(before.name));
}

#if defined(__x86_64__) || defined(_M_X64)

TEST_CASE("AVX2 elementwise kernels match scalar bit for bit") {
    if (!avx2_available()) return;
    const KernelTable& s = scalar_kernels();
    const KernelTable& v = avx2_kernels();
    std::mt19937_64 rng(0x5eed5eedULL);

    for (const std::size_t n : kSizes) {
        CAPTURE(n);
        const auto x = random_vector(rng, n, -7.0, 7.0);
        const auto y = random_vector(rng, n, -7.0, 7.0);
        const auto u = random_vector(rng, n, -7.0, 7.0);
        const auto w = random_vector(rng, n, -7.0, 7.0);

        CHECK(s.reduce_max(x.data(), n) == v.reduce_max(x.data(), n));

        auto xs = x;
        auto xv = x;
        s.scale_inplace(xs.data(), n, 0.37);
        v.scale_inplace(xv.data(), n, 0.37);
        for (std::size_t i = 0; i < n; ++i) CHECK(xs[i] == xv[i]);

        std::vector<double> outs(n), outv(n);
        s.blend_diff(0.8, x.data(), y.data(), 0.2, u.data(), w.data(), outs.data(), n);
        v.blend_diff(0.8, x.data(), y.data(), 0.2, u.data(), w.data(), outv.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(outs[i] == outv[i]);
    }
}

TEST_CASE("AVX2 transcendental kernels match scalar within 1e-11") {
    if (!avx2_available()) return;
    const KernelTable& s = scalar_kernels();
    const KernelTable& v = avx2_kernels();
    std::mt19937_64 rng(0xfeedbeefULL);

    for (const std::size_t n : kSizes) {
        CAPTURE(n);
        const auto x = random_vector(rng, n, -30.0, 30.0);
        std::vector<double> outs(n), outv(n);
        const double sums = s.exp_shift_scale(x.data(), n, 1.5, 0.5, outs.data());
        const double sumv = v.exp_shift_scale(x.data(), n, 1.5, 0.5, outv.data());
        CHECK(sums == doctest::Approx(sumv).epsilon(1e-11));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(outs[i] == doctest::Approx(outv[i]).epsilon(1e-11));

        const auto p = random_simplex(rng, n);
        const auto q = random_simplex(rng, n);
        const KlSum ks = s.kl_sum(p.data(), q.data(), n);
        const KlSum kv = v.kl_sum(p.data(), q.data(), n);
        CHECK(ks.support_violation == kv.support_violation);
        CHECK(ks.sum == doctest::Approx(kv.sum).epsilon(1e-11));
    }
}

TEST_CASE("support violation is flagged identically by both tables") {
    if (!avx2_available()) return;
    // p puts mass where q has none, at a lane past the first vector width
    std::vector<double> p = {0.1, 0.1, 0.1, 0.1, 0.1, 0.5, 0.0, 0.0, 0.0};
    std::vector<double> q = {0.2, 0.2, 0.2, 0.2, 0.2, 0.0, 0.0, 0.0, 0.0};
    const KlSum ks = scalar_kernels().kl_sum(p.data(), q.data(), p.size());
    const KlSum kv = avx2_kernels().kl_sum(p.data(), q.data(), p.size());
    CHECK(ks.support_violation);
    CHECK(kv.support_violation);
}

#endif  // x86_64

TEST_CASE("scalar kernels compute what they claim") {
    const KernelTable& s = scalar_kernels();

    const double x[] = {3.0, -1.0, 7.5, 7.5, 0.0};
    CHECK(s.reduce_max(x, 5) == 7.5);
    CHECK(s.reduce_max(x, 1) == 3.0);

    double y[] = {1.0, -2.0, 4.0};
    s.scale_inplace(y, 3, 0.5);
    CHECK(y[0] == 0.5);
    CHECK(y[1] == -1.0);
    CHECK(y[2] == 2.0);

    // exp((x - shift) * inv_t) against libm
    const double in[] = {2.0, 1.0, 0.1};
    double out[3];
    const double sum = s.exp_shift_scale(in, 3, 2.0, 0.5, out);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(std::exp(-0.95)).epsilon(1e-14));
    CHECK(sum == doctest::Approx(out[0] + out[1] + out[2]).epsilon(1e-14));

    // KL of a known pair, and the zero-mass convention
    const double p[] = {0.5, 0.5, 0.0};
    const double q[] = {0.25, 0.75, 0.0};
    const KlSum kl = s.kl_sum(p, q, 3);
    CHECK(!kl.support_violation);
    CHECK(kl.sum == doctest::Approx(0.14384103622589042).epsilon(1e-13));

    const double a[] = {1.0, 0.0};
    const double b[] = {0.0, 0.0};
    const KlSum bad = s.kl_sum(a, b, 2);
    CHECK(bad.support_violation);

    // out = a*(x - y) + b*(u - v)
    const double bx[] = {2.0, 4.0};
    const double by[] = {1.0, 1.0};
    const double bu[] = {10.0, 0.0};
    const double bv[] = {4.0, 2.0};
    double bout[2];
    s.blend_diff(0.5, bx, by, 0.25, bu, bv, bout, 2);
    CHECK(bout[0] == 0.5 * 1.0 + 0.25 * 6.0);
    CHECK(bout[1] == 0.5 * 3.0 + 0.25 * (-2.0));
}
