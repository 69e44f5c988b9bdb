#include "estavg/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace estavg::harness {

namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void check_written(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

double display_factor(const ExperimentConfig& c, const std::string& row) {
    switch (c.study) {
        case Study::Location: return 100.0;
        case Study::Weibull: return row.starts_with("beta") ? 1000.0 : 1.0;
        case Study::Boolean: return row.starts_with("alpha") ? 100.0 : 1.0;
        case Study::Quantile: return c.family == "weibull" ? 1000.0 : 1.0;
        case Study::Synthetic: return 1.0;
    }
    return 1.0;
}

}  // namespace

std::string format_value(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
}

void write_summary_csv(std::ostream& os, const SummaryTable& table) {
    os << kSummaryHeader << '\n';
    for (const SummaryRow& row : table.rows) {
        os << row.estimator << ',' << format_value(row.mse) << ',' << format_value(row.mse_se) << ','
           << format_value(row.coverage) << ',' << row.dropped << '\n';
    }
}

void write_records_csv(std::ostream& os, const std::vector<ReplicationRecord>& records, const StudyLayout& layout) {
    os << "replicate,failed,boot_dropped";
    for (const std::string& name : layout.names) os << ',' << name;
    for (std::size_t i = 0; i < layout.names.size(); ++i) {
        if (layout.has_interval[i]) os << ',' << layout.names[i] << "_risk," << layout.names[i] << "_hit";
    }
    for (const std::string& name : layout.extras) os << ',' << name;
    os << '\n';
    for (const ReplicationRecord& r : records) {
        os << r.index << ',' << (r.failed ? 1 : 0) << ',' << r.boot_dropped;
        for (double v : r.values) os << ',' << format_value(v);
        for (std::size_t i = 0; i < layout.names.size(); ++i) {
            if (!layout.has_interval[i]) continue;
            os << ',' << format_value(r.risks[i]) << ',';
            if (r.hits[i] < 0) {
                os << "NA";
            } else {
                os << r.hits[i];
            }
        }
        for (double v : r.extras) os << ',' << format_value(v);
        os << '\n';
    }
}

void emit_csv(const SummaryTable& table, const std::string& path) {
    std::ofstream out = open_for_write(path);
    write_summary_csv(out, table);
    check_written(out, path);
}

void emit_records_csv(const std::vector<ReplicationRecord>& records, const StudyLayout& layout,
                      const std::string& path) {
    std::ofstream out = open_for_write(path);
    write_records_csv(out, records, layout);
    check_written(out, path);
}

void emit_config_echo(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << canonical_text(config);
    check_written(out, path);
}

void print_table(std::ostream& os, const ExperimentConfig& config, const SummaryTable& table) {
    os << (config.name.empty() ? std::string(to_string(config.study)) : config.name) << "  (R=" << config.reps
       << ", B=" << config.boot << ")\n";
    os << std::left << std::setw(12) << "estimator" << std::right << std::setw(8) << "scale" << std::setw(14) << "mse"
       << std::setw(14) << "(se)" << std::setw(12) << "coverage" << std::setw(10) << "dropped" << '\n';
    for (const SummaryRow& row : table.rows) {
        const double factor = display_factor(config, row.estimator);
        auto scaled = [factor](std::optional<double> v) -> std::optional<double> {
            if (v) return *v * factor;
            return std::nullopt;
        };
        os << std::left << std::setw(12) << row.estimator << std::right << std::setw(8)
           << ("x" + format_value(factor)) << std::setw(14) << format_value(scaled(row.mse)) << std::setw(14)
           << ("(" + format_value(scaled(row.mse_se)) + ")") << std::setw(12) << format_value(row.coverage)
           << std::setw(10) << row.dropped << '\n';
    }
}

}  // namespace estavg::harness
