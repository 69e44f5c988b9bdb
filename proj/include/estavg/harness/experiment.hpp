#pragma once

#include "estavg/harness/config.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace estavg::harness {

/// Row layout of a study: estimator names in output order, the value each
/// estimates, and whether it carries a confidence interval. `extras` name
/// auxiliary per-replicate measurements (e.g. observed area fraction).
struct StudyLayout {
    std::vector<std::string> names;
    std::vector<double> truths;
    std::vector<bool> has_interval;
    std::vector<std::string> extras;
};

[[nodiscard]] StudyLayout study_layout(const ExperimentConfig& config);

/// Outcome of one replication. Vectors follow the layout order; a value is NaN
/// when that estimator was unavailable and `hits` holds -1 where no interval
/// was formed.
struct ReplicationRecord {
    std::size_t index = 0;
    bool failed = false;
    std::string failure;
    std::vector<double> values;
    std::vector<double> risks;
    std::vector<int> hits;
    std::vector<double> extras;
    std::size_t boot_dropped = 0;
};

/// Runs replication `index`; every random draw comes from a stream derived
/// from (seed, index), so the record does not depend on scheduling.
[[nodiscard]] ReplicationRecord run_replicate(const ExperimentConfig& config, const StudyLayout& layout,
                                              std::size_t index);

struct SummaryRow {
    std::string estimator;
    std::optional<double> mse;
    std::optional<double> mse_se;
    std::optional<double> coverage;
    std::size_t successes = 0;
    std::size_t dropped = 0;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
};

/// Thrown when more than half of the replications fail.
class ExcessFailures : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentResult {
    StudyLayout layout;
    std::vector<ReplicationRecord> records;
    SummaryTable summary;
};

/// R replications on `config.threads` workers, gathered by replicate index.
/// Throws ExcessFailures when failures exceed 50%.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

/// Per-row MSE over available values, the standard error of that mean of
/// squared errors (absent for fewer than two values), coverage in percent,
/// and the number of replications lacking the row.
[[nodiscard]] SummaryTable mse_summary(const std::vector<ReplicationRecord>& records, const StudyLayout& layout);

/// Coverage percentage per row; absent when the row has no intervals.
[[nodiscard]] std::vector<std::optional<double>> coverage_summary(const std::vector<ReplicationRecord>& records,
                                                                  const StudyLayout& layout);

}  // namespace estavg::harness
