#pragma once

// The runnable estimation schemes. Each consumes a SampleSource and emits an
// EstimateReport; the sequential schemes take their draw count from a Plan.

#include <cstdint>
#include <memory>

#include "ras/planner.hpp"
#include "ras/sampling.hpp"

namespace ras {

enum class EstimatorKind { fixed_n, dklr, gbas, two_stage };

const char* estimator_kind_name(EstimatorKind kind);

struct EstimateReport {
    double p_hat = 0.0;
    EstimatorKind method = EstimatorKind::fixed_n;
    std::int64_t k_used = 0;
    std::uint64_t samples_consumed = 0;
    TiltConfig tilt_applied;
    // Realized T_k (or M); 0 for the fixed-n baseline, which has no
    // negative-binomial stage.
    std::uint64_t aux_negbin_total = 0;
    std::shared_ptr<const EstimateReport> stage1; // two-stage only
    // Two-stage extras: the certified lower bound fed to the stage-2 planner
    // and whether it had to be clamped below 1.
    double stage2_lower_bound = 0.0;
    bool lower_bound_clamped = false;
};

// Sample average over exactly n bits; no guarantee attached.
EstimateReport estimate_fixed_n(SampleSource& source, std::uint64_t n);

// p_hat = (k - 1) / (T_k * c_tilt) from one negative binomial draw.
EstimateReport estimate_dklr(SampleSource& source, const Plan& plan);

// p_hat = (k - 1) / (S * c_tilt) with S ~ Gamma(M, 1) given M = T_k.
EstimateReport estimate_gbas(SampleSource& source, const Plan& plan,
                             RngStream& rng);

// Stage 1: GBAS at (sqrt(eps), delta/2). Stage 2: fixed-k run planned for
// [p_hat1/(1+sqrt(eps)), 1] at (eps, delta/2), on fresh draws from the same
// stream. A stage-1 estimate at or above 1+sqrt(eps) degenerates to a lower
// bound clamped just below 1; the report records the event.
EstimateReport estimate_two_stage(SampleSource& source, const RasTarget& target,
                                  bool tilt_enabled, int divisor, RngStream& rng);

// The pieces of estimate_two_stage, exposed so the harness can interleave
// planning across replicates while producing identical estimates.
double two_stage_lower_bound(const TwoStagePlanner& planner, double p_hat1,
                             bool* clamped);
EstimateReport assemble_two_stage_report(const EstimateReport& stage1,
                                         const EstimateReport& stage2, double a,
                                         bool clamped);

} // namespace ras
