#pragma once

#include "estavg/harness/config.hpp"
#include "estavg/harness/experiment.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace estavg::harness {

inline constexpr const char* kSummaryHeader = "estimator,mse,mse_se,coverage,dropped";

/// %.6g, or "NA" when absent or not finite.
[[nodiscard]] std::string format_value(std::optional<double> v);

/// Summary CSV: the fixed header, then one row per estimator in layout order.
void write_summary_csv(std::ostream& os, const SummaryTable& table);

/// Per-replicate CSV: replicate, failed, boot_dropped, one column per
/// estimator, risk and hit columns for interval rows, then the extras.
void write_records_csv(std::ostream& os, const std::vector<ReplicationRecord>& records, const StudyLayout& layout);

/// File variants; throw std::runtime_error on I/O failure.
void emit_csv(const SummaryTable& table, const std::string& path);
void emit_records_csv(const std::vector<ReplicationRecord>& records, const StudyLayout& layout,
                      const std::string& path);
void emit_config_echo(const ExperimentConfig& config, const std::string& path);

/// Human-readable table. Each row's MSE is multiplied for display by the
/// factor shown in its scale column (x100 location; x1000 Weibull shape;
/// x100 Boolean shape; x1000 quantiles under a Weibull truth). Stored CSV
/// values are never scaled.
void print_table(std::ostream& os, const ExperimentConfig& config, const SummaryTable& table);

}  // namespace estavg::harness
