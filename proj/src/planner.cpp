#include "ras/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ras {

namespace {

// Acceptance tolerates ulp-level ties: a strict "< delta" comparison on
// doubles would make the boundary k depend on rounding noise.
constexpr double kAcceptSlack = 1e-15;

void check_cancel(const SearchLimits& limits) {
    if (limits.cancel && limits.cancel->load(std::memory_order_relaxed))
        throw PlannerCancelled("k-search cancelled");
}

// Chernoff screening bounds on the negative binomial tails, via the binomial
// duality T_k(p) <= t  <=>  Bin(floor(t), p) >= k. Used only to skip
// subintervals whose tails provably cannot raise the running maxima; the
// returned values always dominate the exact tails.
double screen_negbin_upper(double t, std::int64_t k, double p) {
    const double tf = std::floor(t);
    if (tf < static_cast<double>(k))
        return 1.0;
    const double q = (static_cast<double>(k) - 1.0) / tf; // Bin(t,p) <= k-1
    if (q >= p)
        return 1.0;
    const double kl = detail::kl_bernoulli(q, 1.0 - q, p, 1.0 - p);
    return std::min(1.0, std::exp(-tf * kl) * 1.0000001);
}

double screen_negbin_cdf(double t, std::int64_t k, double p) {
    const double tf = std::floor(t);
    if (tf < static_cast<double>(k))
        return 0.0;
    const double q = static_cast<double>(k) / tf; // Bin(t,p) >= k
    if (q <= p)
        return 1.0;
    const double kl = detail::kl_bernoulli(q, 1.0 - q, p, 1.0 - p);
    return std::min(1.0, std::exp(-tf * kl) * 1.0000001);
}

// The partition error is not quite monotone in k: the integer thresholds
// inside the negative binomial CDF make it locally jagged, so feasibility
// can lapse again for a band of k values above the true minimum (bands up
// to ~30 wide show up at the delta = 1e-6 scale). The downward scan
// therefore keeps going until it has seen kInfeasibleRun consecutive
// infeasible values, which is what certifies minimality here.
constexpr int kInfeasibleRun = 96;

// First k > limits.min_k_hint accepted by `feasible`: geometric doubling
// brackets an accepted k (starting from seed_k when given), binary search
// narrows it, and the band-aware downward scan settles the minimum. Any
// accepted starting point lands on the same answer: bands are far narrower
// than kInfeasibleRun, so every scan walks down into the same run of
// accepted values before its stop condition can trigger.
std::int64_t search_min_k(const std::function<bool(std::int64_t)>& feasible,
                          const SearchLimits& limits) {
    const std::int64_t floor_k = std::max<std::int64_t>(limits.min_k_hint, 1);

    const auto scan_down = [&](std::int64_t from) {
        std::int64_t best = from;
        int run = 0;
        for (std::int64_t cand = from - 1; cand > floor_k && run < kInfeasibleRun;
             --cand) {
            check_cancel(limits);
            if (feasible(cand)) {
                best = cand;
                run = 0;
            } else {
                ++run;
            }
        }
        return best;
    };

    std::int64_t start = floor_k + 1;
    if (limits.seed_k > start && limits.seed_k <= limits.k_ceiling)
        start = limits.seed_k;
    check_cancel(limits);
    if (feasible(start))
        return scan_down(start);

    std::int64_t lo = start; // not feasible
    std::int64_t step = 1;
    std::int64_t hi = 0;
    while (true) {
        check_cancel(limits);
        std::int64_t cand = lo + step;
        if (cand > limits.k_ceiling)
            cand = limits.k_ceiling;
        if (feasible(cand)) {
            hi = cand;
            break;
        }
        lo = cand;
        if (cand == limits.k_ceiling)
            throw PlannerCeilingError("no feasible k at or below the ceiling");
        step *= 2;
    }
    while (hi - lo > 1) {
        check_cancel(limits);
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return scan_down(hi);
}

double gbas_error(std::int64_t k, double epsilon, double c_tilt) {
    const GammaParams params(static_cast<double>(k),
                             (static_cast<double>(k) - 1.0) / c_tilt);
    return gamma_cdf_upper(1.0 / (1.0 - epsilon), params) +
           gamma_cdf(1.0 / (1.0 + epsilon), params);
}

// Whether the partition error exceeds the threshold, bailing out as soon as
// the running maxima prove it. Infeasible k values (the common case inside a
// k-search) are usually settled by the first few subintervals.
bool dklr_partition_error_exceeds(const PIntervalPartition& partition,
                                  double epsilon, std::int64_t k,
                                  const TiltConfig& tilt, double threshold) {
    const double c = tilt.c_tilt;
    const double km1 = static_cast<double>(k) - 1.0;
    double max_lower = 0.0;
    double max_upper = 0.0;
    const std::size_t m = partition.cut_points.size() - 1;
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = partition.cut_points[i];
        const double hi = std::min(partition.cut_points[i + 1], 1.0);
        const double thr_low = km1 / (lo * (1.0 - epsilon)) / c;
        const double thr_high = km1 / (hi * (1.0 + epsilon)) / c;
        if (screen_negbin_upper(thr_low, k, hi) > max_lower)
            max_lower = std::max(
                max_lower, negbinom_trials_cdf_upper(thr_low, NegBinTrialsParams(k, hi)));
        if (screen_negbin_cdf(thr_high, k, lo) > max_upper)
            max_upper = std::max(
                max_upper,
                negbinom_trials_cdf(thr_high, NegBinTrialsParams(k, lo)).value());
        if (max_lower + max_upper > threshold)
            return true;
    }
    return false;
}

} // namespace

double tilt_value(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::domain_error("tilt_value requires epsilon in (0, 1)");
    return 2.0 * epsilon /
           ((1.0 - epsilon * epsilon) * std::log1p(2.0 * epsilon / (1.0 - epsilon)));
}

PIntervalPartition PIntervalPartition::make(double a, double epsilon, int divisor) {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("partition requires a in (0, 1)");
    if (divisor < 1)
        throw std::domain_error("partition requires divisor >= 1");
    const double width = (1.0 - a) * epsilon / divisor;
    const auto m = static_cast<std::int64_t>(
        std::max(1.0, std::ceil((1.0 - a) / width - 1e-9)));
    PIntervalPartition part;
    part.a = a;
    part.divisor = divisor;
    part.cut_points.resize(static_cast<std::size_t>(m) + 1);
    for (std::int64_t i = 0; i < m; ++i)
        part.cut_points[static_cast<std::size_t>(i)] = a + static_cast<double>(i) * width;
    part.cut_points.back() = 1.0;
    return part;
}

Plan find_k_gbas(const RasTarget& target, const TiltConfig& tilt,
                 const SearchLimits& limits) {
    const double c = tilt.c_tilt;
    const double accept = target.delta + kAcceptSlack;
    const std::int64_t k = search_min_k(
        [&](std::int64_t cand) {
            return gbas_error(cand, target.epsilon, c) <= accept;
        },
        limits);
    Plan plan;
    plan.method = PlanMethod::gbas;
    plan.k = k;
    plan.target = target;
    plan.tilt = tilt;
    plan.interval_lo = 0.0;
    plan.interval_hi = 1.0;
    plan.achieved_error = gbas_error(k, target.epsilon, c);
    return plan;
}

TailPair dklr_interval_error(double a, double b, double epsilon, std::int64_t k,
                             const TiltConfig& tilt) {
    if (!(a > 0.0 && a <= b && b <= 1.0))
        throw std::domain_error("dklr_interval_error requires 0 < a <= b <= 1");
    if (k < 2)
        throw std::domain_error("dklr_interval_error requires k >= 2");
    const double c = tilt.c_tilt;
    const double km1 = static_cast<double>(k) - 1.0;
    const double thr_low = km1 / (a * (1.0 - epsilon)) / c;
    const double thr_high = km1 / (b * (1.0 + epsilon)) / c;
    TailPair tails;
    tails.lower_tail = negbinom_trials_cdf_upper(thr_low, NegBinTrialsParams(k, b));
    tails.upper_tail = negbinom_trials_cdf(thr_high, NegBinTrialsParams(k, a));
    return tails;
}

double dklr_partition_error(const PIntervalPartition& partition, double epsilon,
                            std::int64_t k, const TiltConfig& tilt) {
    if (k < 2)
        throw std::domain_error("dklr_partition_error requires k >= 2");
    const double c = tilt.c_tilt;
    const double km1 = static_cast<double>(k) - 1.0;
    double max_lower = 0.0;
    double max_upper = 0.0;
    const std::size_t m = partition.cut_points.size() - 1;
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = partition.cut_points[i];
        const double hi = std::min(partition.cut_points[i + 1], 1.0);
        const double thr_low = km1 / (lo * (1.0 - epsilon)) / c;
        const double thr_high = km1 / (hi * (1.0 + epsilon)) / c;
        if (screen_negbin_upper(thr_low, k, hi) > max_lower)
            max_lower = std::max(
                max_lower, negbinom_trials_cdf_upper(thr_low, NegBinTrialsParams(k, hi)));
        if (screen_negbin_cdf(thr_high, k, lo) > max_upper)
            max_upper = std::max(
                max_upper,
                negbinom_trials_cdf(thr_high, NegBinTrialsParams(k, lo)).value());
    }
    return max_lower + max_upper;
}

Plan find_k_dklr(double a, const RasTarget& target, const TiltConfig& tilt,
                 int divisor, const SearchLimits& limits) {
    const PIntervalPartition partition =
        PIntervalPartition::make(a, target.epsilon, divisor);
    const double accept = target.delta + kAcceptSlack;
    const std::int64_t k = search_min_k(
        [&](std::int64_t cand) {
            return !dklr_partition_error_exceeds(partition, target.epsilon, cand,
                                                 tilt, accept);
        },
        limits);
    Plan plan;
    plan.method = PlanMethod::dklr_interval;
    plan.k = k;
    plan.target = target;
    plan.tilt = tilt;
    plan.interval_lo = a;
    plan.interval_hi = 1.0;
    plan.achieved_error = dklr_partition_error(partition, target.epsilon, k, tilt);
    plan.divisor = divisor;
    return plan;
}

double speedup_rho(double p, const RasTarget& target) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("speedup_rho requires p in (0, 1)");
    const double se = std::sqrt(target.epsilon);
    const double log_inv_delta = -std::log(target.delta);
    const double front = log_inv_delta / (std::log(2.0) + log_inv_delta);
    const double denom = 1.0 - p * (1.0 - se) / (1.0 + se) + target.epsilon;
    return front / denom;
}

TwoStagePlanner::TwoStagePlanner(const RasTarget& target, bool tilt_enabled,
                                 int divisor, bool text_variant_lower_bound)
    : target_(target),
      tilt_enabled_(tilt_enabled),
      divisor_(divisor),
      text_variant_(text_variant_lower_bound),
      sqrt_epsilon_(std::sqrt(target.epsilon)),
      stage1_(find_k_gbas(RasTarget(sqrt_epsilon_, target.delta / 2.0),
                          TiltConfig::for_epsilon(sqrt_epsilon_, tilt_enabled))) {}

double TwoStagePlanner::lower_bound_for(double p_hat1) const {
    if (!(p_hat1 > 0.0))
        throw std::domain_error("stage-2 lower bound requires p_hat1 > 0");
    const double div = text_variant_ ? (1.0 + target_.epsilon) : (1.0 + sqrt_epsilon_);
    return p_hat1 / div;
}

Plan TwoStagePlanner::stage2_for(double p_hat1, const SearchLimits& limits) const {
    return stage2_for_bound(lower_bound_for(p_hat1), limits);
}

Plan TwoStagePlanner::stage2_for_bound(double a, const SearchLimits& limits) const {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("stage-2 interval is empty: lower bound not in (0, 1)");
    Plan plan = find_k_dklr(a, RasTarget(target_.epsilon, target_.delta / 2.0),
                            TiltConfig::for_epsilon(target_.epsilon, tilt_enabled_),
                            divisor_, limits);
    plan.method = PlanMethod::two_stage;
    return plan;
}

TwoStagePlanner plan_two_stage(const RasTarget& target, bool tilt_enabled,
                               int divisor) {
    return TwoStagePlanner(target, tilt_enabled, divisor);
}

} // namespace ras
