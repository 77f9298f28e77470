#include "ras/estimators.hpp"

namespace ras {

const char* estimator_kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::fixed_n: return "fixed_n";
        case EstimatorKind::dklr: return "dklr";
        case EstimatorKind::gbas: return "gbas";
        case EstimatorKind::two_stage: return "two_stage";
    }
    return "unknown";
}

EstimateReport estimate_fixed_n(SampleSource& source, std::uint64_t n) {
    if (n < 1)
        throw std::domain_error("estimate_fixed_n requires n >= 1");
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        ones += source.next_bernoulli() ? 1 : 0;
    EstimateReport report;
    report.method = EstimatorKind::fixed_n;
    report.p_hat = static_cast<double>(ones) / static_cast<double>(n);
    report.k_used = static_cast<std::int64_t>(n);
    report.samples_consumed = n;
    report.tilt_applied = TiltConfig::off();
    return report;
}

EstimateReport estimate_dklr(SampleSource& source, const Plan& plan) {
    if (plan.k < 2)
        throw std::domain_error("estimate_dklr requires plan.k >= 2");
    const std::uint64_t total =
        draw_negbin_trials(source, static_cast<std::uint64_t>(plan.k));
    EstimateReport report;
    report.method = EstimatorKind::dklr;
    report.p_hat = (static_cast<double>(plan.k) - 1.0) /
                   (static_cast<double>(total) * plan.tilt.c_tilt);
    report.k_used = plan.k;
    report.samples_consumed = total;
    report.tilt_applied = plan.tilt;
    report.aux_negbin_total = total;
    return report;
}

EstimateReport estimate_gbas(SampleSource& source, const Plan& plan,
                             RngStream& rng) {
    if (plan.k < 2)
        throw std::domain_error("estimate_gbas requires plan.k >= 2");
    const std::uint64_t m =
        draw_negbin_trials(source, static_cast<std::uint64_t>(plan.k));
    const double s = draw_gamma(static_cast<double>(m), rng);
    EstimateReport report;
    report.method = EstimatorKind::gbas;
    report.p_hat = (static_cast<double>(plan.k) - 1.0) / (s * plan.tilt.c_tilt);
    report.k_used = plan.k;
    report.samples_consumed = m;
    report.tilt_applied = plan.tilt;
    report.aux_negbin_total = m;
    return report;
}

double two_stage_lower_bound(const TwoStagePlanner& planner, double p_hat1,
                             bool* clamped) {
    double a = planner.lower_bound_for(p_hat1);
    bool did_clamp = false;
    if (a >= 1.0 - 1e-9) {
        a = 1.0 - 1e-9;
        did_clamp = true;
    }
    if (clamped)
        *clamped = did_clamp;
    return a;
}

EstimateReport assemble_two_stage_report(const EstimateReport& stage1,
                                         const EstimateReport& stage2, double a,
                                         bool clamped) {
    EstimateReport report = stage2;
    report.method = EstimatorKind::two_stage;
    report.samples_consumed = stage1.samples_consumed + stage2.samples_consumed;
    report.stage1 = std::make_shared<const EstimateReport>(stage1);
    report.stage2_lower_bound = a;
    report.lower_bound_clamped = clamped;
    return report;
}

EstimateReport estimate_two_stage(SampleSource& source, const RasTarget& target,
                                  bool tilt_enabled, int divisor,
                                  RngStream& rng) {
    const TwoStagePlanner planner(target, tilt_enabled, divisor);
    const EstimateReport stage1 = estimate_gbas(source, planner.stage1(), rng);
    bool clamped = false;
    const double a = two_stage_lower_bound(planner, stage1.p_hat, &clamped);
    const Plan plan2 = planner.stage2_for_bound(a);
    const EstimateReport stage2 = estimate_dklr(source, plan2);
    return assemble_two_stage_report(stage1, stage2, a, clamped);
}

} // namespace ras
