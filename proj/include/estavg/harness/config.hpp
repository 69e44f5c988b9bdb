#pragma once

#include "estavg/core/weights.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace estavg::harness {

enum class Study { Location, Weibull, Boolean, Quantile, Synthetic };
enum class SigmaMethod { Plugin, NpBoot, PBoot };

[[nodiscard]] std::string_view to_string(Study s) noexcept;
[[nodiscard]] std::string_view to_string(SigmaMethod m) noexcept;
[[nodiscard]] std::optional<Study> parse_study(std::string_view name) noexcept;
[[nodiscard]] std::optional<SigmaMethod> parse_sigma_method(std::string_view name) noexcept;

/// One Monte-Carlo experiment. Fields irrelevant to the chosen study are kept
/// at their defaults and still echoed, so an echo always parses back.
struct ExperimentConfig {
    Study study = Study::Location;
    std::string name;

    // Shared knobs.
    std::size_t n = 100;
    std::size_t reps = 1000;
    std::size_t boot = 1000;
    ConstraintSet constraint = ConstraintSet::Maximal;
    SigmaMethod sigma_method = SigmaMethod::Plugin;
    std::uint64_t seed = 20240101;
    std::size_t threads = 1;
    double level = 0.95;

    // Location and quantile truth: gauss, cauchy, student, logistic, mixture
    // (location) or weibull, gamma, burr, lognormal (quantile).
    std::string family = "gauss";
    double nu = 7.0;
    bool avb = true;

    // Weibull study.
    double beta = 3.0;
    double eta = 10.0;

    // Boolean study.
    double rho = 50.0;
    double alpha = 1.0;
    std::size_t resolution = 1024;
    std::size_t directions = 100;

    // Quantile study. center = "np" centers the bootstrap at q_NP for every
    // estimator, "t" at each estimator's own original-sample value.
    double p = 0.99;
    std::string quantile_center = "np";

    // Synthetic study: group sizes of a random true MSE matrix, and the
    // number of noise draws behind each estimated matrix.
    std::vector<std::size_t> sizes{3, 1};
};

/// Study-specific defaults (constraint, sigma method, B) for a fresh config.
[[nodiscard]] ExperimentConfig default_config(Study study);

/// Throws ConfigError naming the first violated rule.
void validate(const ExperimentConfig& config);

/// Parses a flat JSON object. Missing keys take the study defaults; unknown
/// keys and ill-typed values throw ConfigError. The result is validated.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j);
[[nodiscard]] ExperimentConfig parse_config_text(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Canonical form: every key, sorted, so that parse_config(to_json(c)) == c.
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);
[[nodiscard]] std::string canonical_text(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct Preset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

/// Full-size presets (R = 10^4) covering every cell of the eight result tables:
/// table1-* (location MSE and coverage), table3-* (Weibull), table6-* (Boolean)
/// and table8-* (quantiles).
[[nodiscard]] const std::vector<Preset>& presets();
[[nodiscard]] std::optional<ExperimentConfig> find_preset(std::string_view name);

/// Multiplies R and B by the given factors, rounding to at least R = 1 and B = 2.
[[nodiscard]] ExperimentConfig scaled(ExperimentConfig config, double reps_factor, double boot_factor);

}  // namespace estavg::harness
