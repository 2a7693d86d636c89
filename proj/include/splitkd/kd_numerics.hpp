#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace splitkd {

/// Distillation loss shape: kd_weight * T^2 * KL(teacher || student) at
/// temperature T, plus (1 - kd_weight) * cross-entropy at temperature 1.
struct KdLossConfig {
    double temperature = 2.0;
    double kd_weight = 0.5;
};

/// Temperature softmax with max-subtraction. Output sums to 1 within 1e-12.
std::vector<double> softmax_t(std::span<const double> logits, double temperature);

/// KL(p || q) in nats with 0 * ln(0/q) := 0. Both inputs must sum to 1
/// within 1e-9. Throws std::domain_error when p has mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// -ln(probs[label]).
double cross_entropy(int label, std::span<const double> probs);

double kd_loss(std::span<const double> teacher_logits,
               std::span<const double> student_logits, int label,
               const KdLossConfig& config = {});

/// Analytic gradient of kd_loss with respect to the student logits:
/// kd_weight * T * (softmax_T(student) - softmax_T(teacher))
///   + (1 - kd_weight) * (softmax_1(student) - onehot(label)).
std::vector<double> kd_loss_grad(std::span<const double> teacher_logits,
                                 std::span<const double> student_logits, int label,
                                 const KdLossConfig& config = {});

struct SelfTestReport {
    std::string kernel_name;
    int kl_pairs = 0;
    int kl_negative = 0;            // pairs with KL < 0 (must stay 0)
    double min_kl = 0.0;
    double max_self_kl = 0.0;       // max |KL(p,p)|, budget 1e-12
    double max_softmax_norm_error = 0.0;  // max |sum(p) - 1|, budget 1e-12
    int grad_instances = 0;
    int grad_failures = 0;          // instances beyond 1e-5 relative error
    double max_grad_rel_error = 0.0;
    bool passed = false;
};

/// Deterministic property run over random logits: KL non-negativity and
/// KL(p,p)=0, softmax normalization, and analytic-vs-central-difference
/// gradient agreement (h = 1e-5, relative error budget 1e-5).
SelfTestReport kd_selftest(std::uint64_t seed, int kl_pairs = 1000,
                           int grad_instances = 100);

std::string format_report(const SelfTestReport& report);

}  // namespace splitkd
