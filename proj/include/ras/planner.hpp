#pragma once

// Draw-count planning for the sequential estimators: the tilting constant,
// per-interval error bounds for the fixed-k stopping rule, the minimal k
// searches, and the analytic speedup model.

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ras/special_functions.hpp"

namespace ras {

struct RasTarget {
    double epsilon = 0.1;
    double delta = 0.01;

    RasTarget(double epsilon_, double delta_) : epsilon(epsilon_), delta(delta_) {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::domain_error("RasTarget requires epsilon in (0, 1)");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::domain_error("RasTarget requires delta in (0, 1)");
    }
};

// c_tilt = 2e / [(1 - e^2) ln(1 + 2e/(1 - e))]; > 1 on (0, 1).
double tilt_value(double epsilon);

struct TiltConfig {
    bool enabled = false;
    double c_tilt = 1.0;

    static TiltConfig off() { return TiltConfig{}; }
    static TiltConfig for_epsilon(double epsilon, bool enabled) {
        TiltConfig t;
        t.enabled = enabled;
        t.c_tilt = enabled ? tilt_value(epsilon) : 1.0;
        return t;
    }
};

enum class PlanMethod { gbas, dklr_interval, two_stage };

struct Plan {
    PlanMethod method = PlanMethod::gbas;
    std::int64_t k = 2;
    RasTarget target{0.1, 0.01};
    TiltConfig tilt;
    double interval_lo = 0.0; // certified p-interval; [0, 1] means "any p"
    double interval_hi = 1.0;
    double achieved_error = 0.0; // planner bound re-evaluated at k
    int divisor = 0;             // partition divisor (dklr plans only)
};

// Cut points a = a_0 < ... < a_m = 1 with widths at most (1 - a) * eps / divisor.
struct PIntervalPartition {
    double a = 0.0;
    int divisor = 100;
    std::vector<double> cut_points;

    static PIntervalPartition make(double a, double epsilon, int divisor);
};

struct SearchLimits {
    std::int64_t k_ceiling = 100000000;
    std::int64_t min_k_hint = 1;
    // Optional starting point for the bracketing phase (e.g. the k found for
    // a nearby interval). Seeds never change the returned k, only the work
    // done to reach it.
    std::int64_t seed_k = 0;
    const std::atomic<bool>* cancel = nullptr; // cooperative cancellation
};

struct PlannerCeilingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PlannerCancelled : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest k > min_k_hint with P(X < 1/(1+eps)) + P(X > 1/(1-eps)) <= delta
// for X ~ Gamma(k, (k-1)/c_tilt).
Plan find_k_gbas(const RasTarget& target, const TiltConfig& tilt,
                 const SearchLimits& limits = {});

// Tail bounds for one subinterval [a, b]: the chance the fixed-k estimate is
// too small (T_k(b) beyond the lower-endpoint threshold) and too large
// (T_k(a) at or below the upper-endpoint threshold).
struct TailPair {
    double lower_tail = 0.0;
    double upper_tail = 0.0;
};
TailPair dklr_interval_error(double a, double b, double epsilon, std::int64_t k,
                             const TiltConfig& tilt);

// max over subintervals of lower_tail plus max over subintervals of upper_tail.
double dklr_partition_error(const PIntervalPartition& partition, double epsilon,
                            std::int64_t k, const TiltConfig& tilt);

// Smallest k with dklr_partition_error <= delta over the partition of [a, 1].
Plan find_k_dklr(double a, const RasTarget& target, const TiltConfig& tilt,
                 int divisor, const SearchLimits& limits = {});

// Analytic speedup of the two-stage scheme over single-stage planning.
double speedup_rho(double p, const RasTarget& target);

// Stage-1 plan at (sqrt(eps), delta/2) plus the stage-2 plan factory.
class TwoStagePlanner {
  public:
    TwoStagePlanner(const RasTarget& target, bool tilt_enabled, int divisor,
                    bool text_variant_lower_bound = false);

    const Plan& stage1() const { return stage1_; }
    double sqrt_epsilon() const { return sqrt_epsilon_; }
    int divisor() const { return divisor_; }
    bool tilt_enabled() const { return tilt_enabled_; }
    const RasTarget& target() const { return target_; }

    // Lower bound a = p_hat1 / (1 + sqrt(eps)); the text's /(1 + eps) variant
    // sits behind the constructor flag.
    double lower_bound_for(double p_hat1) const;

    // Stage-2 plan for the interval [a, 1]; rejects p_hat1 <= 0 and a >= 1.
    Plan stage2_for(double p_hat1, const SearchLimits& limits = {}) const;

    // Same plan from an already-derived lower bound (estimators clamp
    // degenerate bounds below 1 before calling).
    Plan stage2_for_bound(double a, const SearchLimits& limits = {}) const;

  private:
    RasTarget target_;
    bool tilt_enabled_;
    int divisor_;
    bool text_variant_;
    double sqrt_epsilon_;
    Plan stage1_;
};

TwoStagePlanner plan_two_stage(const RasTarget& target, bool tilt_enabled,
                               int divisor = 100);

} // namespace ras
