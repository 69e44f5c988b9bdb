#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/mse_estimation.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace estavg {

struct WeibullFit {
    double shape = 0.0;
    double scale = 0.0;
};

inline constexpr double kWeibullShapeLower = 1e-3;
inline constexpr double kWeibullShapeUpper = 1e3;

/// Maximum likelihood. The shape solves the profile score
///   1/b + mean(log x) - sum x^b log x / sum x^b = 0
/// (strictly decreasing in b) by Newton steps safeguarded inside a bisection
/// bracket on [1e-3, 1e3]; the scale follows in closed form. Throws FitError
/// on nonpositive or constant data, or when the root leaves the bracket.
[[nodiscard]] WeibullFit weibull_ml(std::span<const double> data);

/// The ML profile score above, exposed for monotonicity checks.
[[nodiscard]] double weibull_ml_score(std::span<const double> data, double shape);

/// Method of moments: solve s^2 / xbar^2 = G(1 + 2/b) / G(1 + 1/b)^2 - 1 by
/// bisection on log b, then scale = xbar / G(1 + 1/b).
[[nodiscard]] WeibullFit weibull_mm(std::span<const double> data);

/// Slope of the Weibull-plot regression of log(-log(1 - i/(n+1))) on log x_(i).
[[nodiscard]] double weibull_ols(std::span<const double> data);

/// (shape_ML, shape_MM, shape_OLS, scale_ML) with groups (3, 1).
[[nodiscard]] EstimatorVector weibull_bank_estimates(std::span<const double> data);

/// Plug-in parameter for the parametric bootstrap: (mean of the three shape
/// estimates, scale_ML).
[[nodiscard]] Eigen::Vector2d weibull_center(const EstimatorVector& t);

[[nodiscard]] EstimatorBank<std::span<const double>> weibull_bank();
/// Simulator for parameter (shape, scale).
[[nodiscard]] ModelSimulator<std::vector<double>> weibull_simulator();

}  // namespace estavg
