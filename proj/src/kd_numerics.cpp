#include "splitkd/kd_numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "splitkd/kd/kernels.hpp"

namespace splitkd {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_logits(std::span<const double> logits, const char* who) {
    require(logits.size() >= 2, std::string(who) + ": need at least 2 classes");
    for (double z : logits) {
        require(std::isfinite(z), std::string(who) + ": logits must be finite");
    }
}

void check_config(const KdLossConfig& config) {
    require(config.temperature > 0.0, "kd loss: temperature must be positive");
    require(config.kd_weight >= 0.0 && config.kd_weight <= 1.0,
            "kd loss: kd_weight must be in [0, 1]");
}

double sum_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

std::vector<double> softmax_t(std::span<const double> logits, double temperature) {
    check_logits(logits, "softmax_t");
    require(temperature > 0.0, "softmax_t: temperature must be positive");
    const auto& k = kd::active_kernels();
    std::vector<double> out(logits.size());
    const double shift = k.reduce_max(logits.data(), logits.size());
    const double sum =
        k.exp_shift_scale(logits.data(), logits.size(), shift, 1.0 / temperature, out.data());
    k.scale_inplace(out.data(), out.size(), 1.0 / sum);
    return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "kl_divergence: length mismatch");
    require(!p.empty(), "kl_divergence: empty input");
    for (std::size_t i = 0; i < p.size(); ++i) {
        require(std::isfinite(p[i]) && p[i] >= 0.0,
                "kl_divergence: p entries must be finite and nonnegative");
        require(std::isfinite(q[i]) && q[i] >= 0.0,
                "kl_divergence: q entries must be finite and nonnegative");
    }
    require(std::abs(sum_of(p) - 1.0) <= 1e-9, "kl_divergence: p must sum to 1");
    require(std::abs(sum_of(q) - 1.0) <= 1e-9, "kl_divergence: q must sum to 1");
    const kd::KlSum r = kd::active_kernels().kl_sum(p.data(), q.data(), p.size());
    if (r.support_violation) {
        throw std::domain_error("kl_divergence: q has zero mass where p is positive");
    }
    return r.sum;
}

double cross_entropy(int label, std::span<const double> probs) {
    require(label >= 0 && static_cast<std::size_t>(label) < probs.size(),
            "cross_entropy: label out of range");
    const double p = probs[static_cast<std::size_t>(label)];
    if (!(p > 0.0)) {
        throw std::domain_error("cross_entropy: zero probability at the true label");
    }
    return -std::log(p);
}

double kd_loss(std::span<const double> teacher_logits,
               std::span<const double> student_logits, int label,
               const KdLossConfig& config) {
    check_logits(teacher_logits, "kd_loss(teacher)");
    check_logits(student_logits, "kd_loss(student)");
    require(teacher_logits.size() == student_logits.size(), "kd_loss: length mismatch");
    require(label >= 0 && static_cast<std::size_t>(label) < student_logits.size(),
            "kd_loss: label out of range");
    check_config(config);

    const double t = config.temperature;
    const std::vector<double> pt = softmax_t(teacher_logits, t);
    const std::vector<double> ps = softmax_t(student_logits, t);
    const std::vector<double> ps1 = softmax_t(student_logits, 1.0);
    return config.kd_weight * t * t * kl_divergence(pt, ps) +
           (1.0 - config.kd_weight) * cross_entropy(label, ps1);
}

std::vector<double> kd_loss_grad(std::span<const double> teacher_logits,
                                 std::span<const double> student_logits, int label,
                                 const KdLossConfig& config) {
    check_logits(teacher_logits, "kd_loss_grad(teacher)");
    check_logits(student_logits, "kd_loss_grad(student)");
    require(teacher_logits.size() == student_logits.size(), "kd_loss_grad: length mismatch");
    require(label >= 0 && static_cast<std::size_t>(label) < student_logits.size(),
            "kd_loss_grad: label out of range");
    check_config(config);

    const double t = config.temperature;
    const std::vector<double> pt = softmax_t(teacher_logits, t);
    const std::vector<double> ps = softmax_t(student_logits, t);
    const std::vector<double> ps1 = softmax_t(student_logits, 1.0);
    std::vector<double> onehot(student_logits.size(), 0.0);
    onehot[static_cast<std::size_t>(label)] = 1.0;

    std::vector<double> grad(student_logits.size());
    kd::active_kernels().blend_diff(config.kd_weight * t, ps.data(), pt.data(),
                                    1.0 - config.kd_weight, ps1.data(), onehot.data(),
                                    grad.data(), grad.size());
    return grad;
}

SelfTestReport kd_selftest(std::uint64_t seed, int kl_pairs, int grad_instances) {
    require(kl_pairs >= 1, "kd_selftest: kl_pairs must be positive");
    require(grad_instances >= 1, "kd_selftest: grad_instances must be positive");

    SelfTestReport report;
    report.kernel_name = kd::active_kernels().name;
    report.kl_pairs = kl_pairs;
    report.grad_instances = grad_instances;
    report.min_kl = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> logit(0.0, 2.0);
    std::uniform_int_distribution<int> kl_dim(2, 64);

    auto random_probs = [&](int k) {
        std::vector<double> z(static_cast<std::size_t>(k));
        for (double& v : z) v = logit(rng);
        return softmax_t(z, 1.0);
    };

    for (int i = 0; i < kl_pairs; ++i) {
        const int k = kl_dim(rng);
        const std::vector<double> p = random_probs(k);
        const std::vector<double> q = random_probs(k);

        const double norm_err = std::abs(sum_of(p) - 1.0);
        report.max_softmax_norm_error = std::max(report.max_softmax_norm_error, norm_err);

        const double kl = kl_divergence(p, q);
        if (kl < 0.0) ++report.kl_negative;
        report.min_kl = std::min(report.min_kl, kl);

        const double self_kl = std::abs(kl_divergence(p, p));
        report.max_self_kl = std::max(report.max_self_kl, self_kl);
    }

    std::uniform_int_distribution<int> grad_dim(2, 16);
    std::uniform_real_distribution<double> temp(0.5, 4.0);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    constexpr double kStep = 1e-5;
    constexpr double kGradBudget = 1e-5;

    for (int i = 0; i < grad_instances; ++i) {
        const int k = grad_dim(rng);
        std::vector<double> tz(static_cast<std::size_t>(k));
        std::vector<double> sz(static_cast<std::size_t>(k));
        for (double& v : tz) v = logit(rng);
        for (double& v : sz) v = logit(rng);
        KdLossConfig cfg;
        cfg.temperature = temp(rng);
        cfg.kd_weight = weight(rng);
        const int label = std::uniform_int_distribution<int>(0, k - 1)(rng);

        const std::vector<double> analytic = kd_loss_grad(tz, sz, label, cfg);
        double diff_sq = 0.0;
        double ref_sq = 0.0;
        for (int j = 0; j < k; ++j) {
            std::vector<double> hi = sz;
            std::vector<double> lo = sz;
            hi[static_cast<std::size_t>(j)] += kStep;
            lo[static_cast<std::size_t>(j)] -= kStep;
            const double fd =
                (kd_loss(tz, hi, label, cfg) - kd_loss(tz, lo, label, cfg)) / (2.0 * kStep);
            const double d = analytic[static_cast<std::size_t>(j)] - fd;
            diff_sq += d * d;
            ref_sq += fd * fd;
        }
        const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(ref_sq), 1e-12);
        report.max_grad_rel_error = std::max(report.max_grad_rel_error, rel);
        if (rel > kGradBudget) ++report.grad_failures;
    }

    report.passed = report.kl_negative == 0 && report.grad_failures == 0 &&
                    report.max_self_kl <= 1e-12 && report.max_softmax_norm_error <= 1e-12;
    return report;
}

std::string format_report(const SelfTestReport& report) {
    std::ostringstream oss;
    oss << "kd-selftest kernel=" << report.kernel_name << '\n';
    oss << "  kl pairs: " << report.kl_pairs << ", negative: " << report.kl_negative
        << ", min kl: " << report.min_kl << '\n';
    oss << "  max |kl(p,p)|: " << report.max_self_kl << " (budget 1e-12)\n";
    oss << "  max |sum(softmax)-1|: " << report.max_softmax_norm_error
        << " (budget 1e-12)\n";
    oss << "  gradient instances: " << report.grad_instances
        << ", failures: " << report.grad_failures
        << ", max relative error: " << report.max_grad_rel_error << " (budget 1e-5)\n";
    oss << (report.passed ? "PASS" : "FAIL") << '\n';
    return oss.str();
}

}  // namespace splitkd
