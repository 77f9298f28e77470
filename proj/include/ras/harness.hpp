#pragma once

// Reproducible Monte Carlo experiments over the estimators: coverage
// validation, sample-count measurement, speedup comparison, and the
// reference-table regenerators. Replicate r always draws from the substreams
// (master_seed, r, lane), so results are identical for any thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ras/estimators.hpp"
#include "ras/unbiased_grid.hpp"

namespace ras {

extern const char* const kLibraryVersion;

struct ExperimentConfig {
    EstimatorKind method = EstimatorKind::two_stage;
    double p_true = 0.5;
    RasTarget target{0.1, 0.1};
    std::uint64_t replicates = 1000;
    std::uint64_t master_seed = 1;
    int divisor = 100;
    bool tilt = true;
    int threads = 0;              // 0: hardware count, capped by RAS_THREADS
    double dklr_min_p = 0.0;      // required for method == dklr
    std::uint64_t fixed_n = 0;    // required for method == fixed_n
    std::int64_t fixed_k = 0;     // optional explicit k for dklr/gbas
    bool keep_replicate_log = true;
};

struct ReplicateOutcome {
    double p_hat = 0.0;
    std::uint64_t samples = 0;
    std::int64_t k = 0;
    bool failed = false;
};

struct ExperimentResult {
    double failure_rate = 0.0;
    double failure_rate_se = 0.0;
    double mean_samples = 0.0;
    double mean_samples_se = 0.0;
    double mean_p_hat = 0.0;
    double mean_k = 0.0;
    std::uint64_t replicates = 0;
    std::vector<ReplicateOutcome> log; // present when keep_replicate_log
};

// Runs `replicates` independent estimator executions; a replicate fails when
// |p_hat / p_true - 1| > epsilon.
ExperimentResult run_coverage(const ExperimentConfig& config);

struct SpeedupReport {
    double planner_ratio = 0.0;   // k_GBAS / (k1 + k2(low_p)), low_p from p
    double empirical_ratio = 0.0; // mean over replicates of k_GBAS/(k1 + k2)
    std::int64_t k_gbas = 0;
    std::int64_t k_stage1 = 0;
    std::int64_t k_stage2_planner = 0;
    double mean_k_stage2 = 0.0;
};

SpeedupReport measure_speedup(double p, const RasTarget& target,
                              std::uint64_t replicates, std::uint64_t seed);

struct Table1Row {
    double p = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::int64_t k_gbas = 0;
    std::int64_t k_stage1 = 0;
    std::int64_t k_stage2 = 0;
    double speedup = 0.0;
    double rho = 0.0;
    double one_over_one_minus_p = 0.0;
};

std::vector<Table1Row> regenerate_table1();

struct Table2Row {
    double m_shape = 0.0;
    std::uint64_t n = 0;
    double delta1 = 0.0;
    double x = 0.0;
};

std::vector<Table2Row> regenerate_table2();

std::string format_table1_tsv(const std::vector<Table1Row>& rows);
std::string format_table2_tsv(const std::vector<Table2Row>& rows);

// One CSV of per-replicate rows plus a JSON sidecar carrying the full config,
// the summary, and the library version.
void write_experiment_files(const std::string& base_path,
                            const ExperimentConfig& config,
                            const ExperimentResult& result);

// Thread count from the request, hardware, and the RAS_THREADS cap.
int resolve_thread_count(int requested);

} // namespace ras
