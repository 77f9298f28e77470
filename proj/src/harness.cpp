#include "ras/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

namespace ras {

const char* const kLibraryVersion = "1.0.0";

namespace {

using json = nlohmann::json;

void parallel_for(std::uint64_t count, int threads,
                  const std::function<void(std::uint64_t)>& body) {
    if (threads <= 1 || count < 2) {
        for (std::uint64_t r = 0; r < count; ++r)
            body(r);
        return;
    }
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::uint64_t r = static_cast<std::uint64_t>(t); r < count;
                     r += static_cast<std::uint64_t>(threads))
                    body(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

Plan fixed_k_plan(PlanMethod method, std::int64_t k, const RasTarget& target,
                  const TiltConfig& tilt) {
    Plan plan;
    plan.method = method;
    plan.k = k;
    plan.target = target;
    plan.tilt = tilt;
    plan.achieved_error = std::numeric_limits<double>::quiet_NaN();
    return plan;
}

// Stage-2 plans for a batch of lower bounds, planned in descending order so
// each search seeds from the previous k. Seeds do not change the returned
// plan, so every entry equals what estimate_two_stage would compute on its
// own for the same bound.
std::vector<Plan> plan_stage2_batch(const TwoStagePlanner& planner,
                                    const std::vector<double>& bounds) {
    std::vector<std::size_t> order(bounds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return bounds[i] > bounds[j];
    });
    std::vector<Plan> plans(bounds.size());
    std::int64_t prev_k = 0;
    double prev_a = -1.0;
    std::size_t prev_idx = 0;
    for (const std::size_t idx : order) {
        const double a = bounds[idx];
        if (prev_k > 0 && a == prev_a) {
            plans[idx] = plans[prev_idx];
            continue;
        }
        SearchLimits limits;
        limits.seed_k = prev_k;
        plans[idx] = planner.stage2_for_bound(a, limits);
        prev_k = plans[idx].k;
        prev_a = a;
        prev_idx = idx;
    }
    return plans;
}

ExperimentResult aggregate(const ExperimentConfig& config,
                           std::vector<ReplicateOutcome>&& outcomes) {
    ExperimentResult result;
    result.replicates = config.replicates;
    const double n = static_cast<double>(config.replicates);
    std::uint64_t fails = 0;
    double sum_samples = 0.0;
    double sum_p = 0.0;
    double sum_k = 0.0;
    for (const auto& o : outcomes) {
        fails += o.failed ? 1 : 0;
        sum_samples += static_cast<double>(o.samples);
        sum_p += o.p_hat;
        sum_k += static_cast<double>(o.k);
    }
    result.failure_rate = static_cast<double>(fails) / n;
    result.failure_rate_se =
        std::sqrt(result.failure_rate * (1.0 - result.failure_rate) / n);
    result.mean_samples = sum_samples / n;
    result.mean_p_hat = sum_p / n;
    result.mean_k = sum_k / n;
    double ss = 0.0;
    for (const auto& o : outcomes) {
        const double d = static_cast<double>(o.samples) - result.mean_samples;
        ss += d * d;
    }
    result.mean_samples_se =
        config.replicates > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    if (config.keep_replicate_log)
        result.log = std::move(outcomes);
    return result;
}

} // namespace

int resolve_thread_count(int requested) {
    int threads = requested;
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    if (const char* cap_env = std::getenv("RAS_THREADS")) {
        const long cap = std::strtol(cap_env, nullptr, 10);
        if (cap > 0 && threads > cap)
            threads = static_cast<int>(cap);
    }
    return std::max(threads, 1);
}

ExperimentResult run_coverage(const ExperimentConfig& config) {
    if (config.replicates < 1)
        throw std::domain_error("run_coverage requires replicates >= 1");
    const int threads = resolve_thread_count(config.threads);
    const double eps = config.target.epsilon;
    std::vector<ReplicateOutcome> outcomes(config.replicates);

    const auto finish = [&](std::uint64_t r, const EstimateReport& report) {
        ReplicateOutcome& o = outcomes[r];
        o.p_hat = report.p_hat;
        o.samples = report.samples_consumed;
        o.k = report.k_used;
        o.failed = std::fabs(report.p_hat / config.p_true - 1.0) > eps;
    };

    if (config.method == EstimatorKind::two_stage) {
        const TwoStagePlanner planner(config.target, config.tilt, config.divisor);
        std::vector<SimulatedSource> sources;
        sources.reserve(config.replicates);
        for (std::uint64_t r = 0; r < config.replicates; ++r)
            sources.emplace_back(config.p_true,
                                 RngStream(config.master_seed, r, 0));
        std::vector<EstimateReport> stage1(config.replicates);
        std::vector<double> bounds(config.replicates);
        std::vector<char> clamped(config.replicates, 0);
        parallel_for(config.replicates, threads, [&](std::uint64_t r) {
            RngStream aux(config.master_seed, r, 1);
            stage1[r] = estimate_gbas(sources[r], planner.stage1(), aux);
            bool did_clamp = false;
            bounds[r] = two_stage_lower_bound(planner, stage1[r].p_hat, &did_clamp);
            clamped[r] = did_clamp ? 1 : 0;
        });
        const std::vector<Plan> plans = plan_stage2_batch(planner, bounds);
        parallel_for(config.replicates, threads, [&](std::uint64_t r) {
            const EstimateReport stage2 = estimate_dklr(sources[r], plans[r]);
            finish(r, assemble_two_stage_report(stage1[r], stage2, bounds[r],
                                                clamped[r] != 0));
        });
        return aggregate(config, std::move(outcomes));
    }

    Plan plan;
    if (config.method == EstimatorKind::gbas) {
        plan = config.fixed_k > 0
                   ? fixed_k_plan(PlanMethod::gbas, config.fixed_k, config.target,
                                  TiltConfig::for_epsilon(eps, config.tilt))
                   : find_k_gbas(config.target,
                                 TiltConfig::for_epsilon(eps, config.tilt));
    } else if (config.method == EstimatorKind::dklr) {
        if (config.fixed_k > 0) {
            plan = fixed_k_plan(PlanMethod::dklr_interval, config.fixed_k,
                                config.target,
                                TiltConfig::for_epsilon(eps, config.tilt));
        } else {
            if (!(config.dklr_min_p > 0.0 && config.dklr_min_p < 1.0))
                throw std::domain_error("dklr coverage requires dklr_min_p in (0, 1)");
            plan = find_k_dklr(config.dklr_min_p, config.target,
                               TiltConfig::for_epsilon(eps, config.tilt),
                               config.divisor);
        }
    } else if (config.method == EstimatorKind::fixed_n) {
        if (config.fixed_n < 1)
            throw std::domain_error("fixed_n coverage requires fixed_n >= 1");
    }

    parallel_for(config.replicates, threads, [&](std::uint64_t r) {
        SimulatedSource source(config.p_true, RngStream(config.master_seed, r, 0));
        RngStream aux(config.master_seed, r, 1);
        EstimateReport report;
        switch (config.method) {
            case EstimatorKind::fixed_n:
                report = estimate_fixed_n(source, config.fixed_n);
                break;
            case EstimatorKind::dklr:
                report = estimate_dklr(source, plan);
                break;
            case EstimatorKind::gbas:
                report = estimate_gbas(source, plan, aux);
                break;
            case EstimatorKind::two_stage:
                break; // handled above
        }
        finish(r, report);
    });
    return aggregate(config, std::move(outcomes));
}

SpeedupReport measure_speedup(double p, const RasTarget& target,
                              std::uint64_t replicates, std::uint64_t seed) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("measure_speedup requires p in (0, 1)");
    SpeedupReport report;
    const Plan gbas_plan =
        find_k_gbas(target, TiltConfig::for_epsilon(target.epsilon, true));
    const TwoStagePlanner planner(target, true, 100);
    report.k_gbas = gbas_plan.k;
    report.k_stage1 = planner.stage1().k;

    const double se = std::sqrt(target.epsilon);
    const double low_p = p * (1.0 - se) / (1.0 + se);
    report.k_stage2_planner = planner.stage2_for_bound(low_p).k;
    report.planner_ratio =
        static_cast<double>(report.k_gbas) /
        static_cast<double>(report.k_stage1 + report.k_stage2_planner);

    if (replicates > 0) {
        const int threads = resolve_thread_count(0);
        std::vector<double> bounds(replicates);
        parallel_for(replicates, threads, [&](std::uint64_t r) {
            SimulatedSource source(p, RngStream(seed, r, 0));
            RngStream aux(seed, r, 1);
            const EstimateReport stage1 =
                estimate_gbas(source, planner.stage1(), aux);
            bounds[r] = two_stage_lower_bound(planner, stage1.p_hat, nullptr);
        });
        const std::vector<Plan> plans = plan_stage2_batch(planner, bounds);
        double sum_ratio = 0.0;
        double sum_k2 = 0.0;
        for (const Plan& plan : plans) {
            sum_ratio += static_cast<double>(report.k_gbas) /
                         static_cast<double>(report.k_stage1 + plan.k);
            sum_k2 += static_cast<double>(plan.k);
        }
        report.empirical_ratio = sum_ratio / static_cast<double>(replicates);
        report.mean_k_stage2 = sum_k2 / static_cast<double>(replicates);
    }
    return report;
}

std::vector<Table1Row> regenerate_table1() {
    const double ps[3] = {0.9, 0.5, 0.1};
    const double epsilons[3] = {0.1, 0.1, 0.01};
    const double deltas[3] = {1e-2, 1e-6, 1e-6};

    // The GBAS and stage-1 draw counts depend only on (epsilon, delta);
    // compute the three distinct column pairs once.
    std::int64_t k_gbas[3];
    std::int64_t k_stage1[3];
    TwoStagePlanner planners[3] = {
        TwoStagePlanner(RasTarget(epsilons[0], deltas[0]), true, 100),
        TwoStagePlanner(RasTarget(epsilons[1], deltas[1]), true, 100),
        TwoStagePlanner(RasTarget(epsilons[2], deltas[2]), true, 100)};
    for (int j = 0; j < 3; ++j) {
        const RasTarget target(epsilons[j], deltas[j]);
        k_gbas[j] =
            find_k_gbas(target, TiltConfig::for_epsilon(target.epsilon, true)).k;
        k_stage1[j] = planners[j].stage1().k;
    }

    std::vector<Table1Row> rows;
    rows.reserve(9);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double p = ps[i];
            const RasTarget target(epsilons[j], deltas[j]);
            const double se = std::sqrt(target.epsilon);
            const double low_p = p * (1.0 - se) / (1.0 + se);
            Table1Row row;
            row.p = p;
            row.epsilon = target.epsilon;
            row.delta = target.delta;
            row.k_gbas = k_gbas[j];
            row.k_stage1 = k_stage1[j];
            row.k_stage2 = planners[j].stage2_for_bound(low_p).k;
            row.speedup = static_cast<double>(row.k_gbas) /
                          static_cast<double>(row.k_stage1 + row.k_stage2);
            row.rho = speedup_rho(p, target);
            row.one_over_one_minus_p = 1.0 / (1.0 - p);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<Table2Row> regenerate_table2() {
    const double ms[5] = {1e4, 1e4, 1e4, 1e4, 1e5};
    const std::uint64_t ns[5] = {1000, 10000, 1000, 100, 1000};
    const double d1s[5] = {1e-6, 1e-6, 1e-8, 1e-8, 1e-8};
    std::vector<Table2Row> rows;
    rows.reserve(5);
    for (int i = 0; i < 5; ++i) {
        Table2Row row;
        row.m_shape = ms[i];
        row.n = ns[i];
        row.delta1 = d1s[i];
        row.x = ratio_bound(static_cast<std::uint64_t>(ms[i]), ns[i], d1s[i]).x;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

} // namespace

std::string format_table1_tsv(const std::vector<Table1Row>& rows) {
    std::string out =
        "p\tepsilon\tdelta\tk_gbas\tk_stage1\tk_stage2\tspeedup\trho\tone_over_1mp\n";
    for (const auto& r : rows) {
        out += format_double("%g", r.p) + "\t" + format_double("%g", r.epsilon) +
               "\t" + format_double("%g", r.delta) + "\t" +
               std::to_string(r.k_gbas) + "\t" + std::to_string(r.k_stage1) +
               "\t" + std::to_string(r.k_stage2) + "\t" +
               format_double("%.2f", r.speedup) + "\t" +
               format_double("%.2f", r.rho) + "\t" +
               format_double("%.2f", r.one_over_one_minus_p) + "\n";
    }
    return out;
}

std::string format_table2_tsv(const std::vector<Table2Row>& rows) {
    std::string out = "M\tn\tdelta1\tx\n";
    for (const auto& r : rows) {
        out += format_double("%g", r.m_shape) + "\t" + std::to_string(r.n) + "\t" +
               format_double("%g", r.delta1) + "\t" + format_double("%.8f", r.x) +
               "\n";
    }
    return out;
}

void write_experiment_files(const std::string& base_path,
                            const ExperimentConfig& config,
                            const ExperimentResult& result) {
    std::string csv = "replicate,p_hat,samples,k,failed\n";
    for (std::size_t r = 0; r < result.log.size(); ++r) {
        const auto& o = result.log[r];
        csv += std::to_string(r) + "," + format_double("%.17g", o.p_hat) + "," +
               std::to_string(o.samples) + "," + std::to_string(o.k) + "," +
               (o.failed ? "1" : "0") + "\n";
    }
    std::ofstream csv_out(base_path + ".csv", std::ios::binary);
    if (!csv_out)
        throw std::runtime_error("cannot write " + base_path + ".csv");
    csv_out << csv;

    json sidecar;
    sidecar["library_version"] = kLibraryVersion;
    sidecar["config"] = {{"method", estimator_kind_name(config.method)},
                         {"p_true", config.p_true},
                         {"epsilon", config.target.epsilon},
                         {"delta", config.target.delta},
                         {"replicates", config.replicates},
                         {"master_seed", config.master_seed},
                         {"divisor", config.divisor},
                         {"tilt", config.tilt},
                         {"threads", config.threads},
                         {"dklr_min_p", config.dklr_min_p},
                         {"fixed_n", config.fixed_n},
                         {"fixed_k", config.fixed_k}};
    sidecar["summary"] = {{"failure_rate", result.failure_rate},
                          {"failure_rate_se", result.failure_rate_se},
                          {"mean_samples", result.mean_samples},
                          {"mean_samples_se", result.mean_samples_se},
                          {"mean_p_hat", result.mean_p_hat},
                          {"mean_k", result.mean_k},
                          {"replicates", result.replicates}};
    std::ofstream json_out(base_path + ".json", std::ios::binary);
    if (!json_out)
        throw std::runtime_error("cannot write " + base_path + ".json");
    json_out << sidecar.dump(2) << "\n";
}

} // namespace ras
