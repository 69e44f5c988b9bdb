#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/mse_estimation.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace estavg {

/// The x_(floor(n p)) order statistic. Throws DomainError unless
/// 1 <= floor(n p) <= n.
[[nodiscard]] double quantile_np(std::span<const double> data, double p);

struct GammaFit {
    double shape = 0.0;
    double scale = 0.0;
};

/// ML fit. The shape solves log a - digamma(a) = log(mean x) - mean(log x)
/// by Newton; the scale is mean(x) / a. Throws FitError for n < 3,
/// nonpositive data or a degenerate sample.
[[nodiscard]] GammaFit gamma_ml(std::span<const double> data);

struct BurrFit {
    double c = 0.0;
    double k = 0.0;
};

inline constexpr double kBurrShapeLower = 1e-3;
inline constexpr double kBurrShapeUpper = 1e3;

/// ML fit of Burr XII, F(x) = 1 - (1 + x^c)^-k. For fixed c the optimal k is
/// n / sum log(1 + x^c), so the fit maximizes the one-dimensional profile
/// likelihood in log c over [1e-3, 1e3] from the starts c in {0.5, 2, 5}.
/// Throws FitError when no start converges.
[[nodiscard]] BurrFit burr_ml(std::span<const double> data);

/// Burr log-likelihood, for tests.
[[nodiscard]] double burr_log_likelihood(std::span<const double> data, double c, double k);

enum class QuantileMethod { Weibull, Gamma, Burr, Nonparametric };

[[nodiscard]] std::string_view to_string(QuantileMethod method);

/// All four methods in bank order.
[[nodiscard]] std::vector<QuantileMethod> all_quantile_methods();

/// Estimated p-quantile under one method.
[[nodiscard]] double quantile_estimate(QuantileMethod method, std::span<const double> data, double p);

/// Bank for a fixed list of methods; a failing fit throws FitError and drops
/// the bootstrap replicate.
[[nodiscard]] EstimatorBank<std::span<const double>> quantile_bank(std::vector<QuantileMethod> methods, double p);

/// Original-sample evaluation: methods whose fit fails are removed.
struct QuantileBankResult {
    EstimatorVector estimates;
    std::vector<QuantileMethod> methods;
};

/// T = (q_W, q_G, q_B, q_NP) minus any method whose fit fails on `data`.
/// Throws FitError if the nonparametric estimate itself is unavailable.
[[nodiscard]] QuantileBankResult quantile_bank_estimates(std::span<const double> data, double p);

}  // namespace estavg
