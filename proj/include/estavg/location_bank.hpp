#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/mse_estimation.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace estavg {

/// Mean and median of a location sample, in that order (k = 2, d = 1).
/// The median of an even-sized sample is the midpoint of the two central
/// order statistics.
[[nodiscard]] EstimatorVector mean_median_bank(std::span<const double> data);

[[nodiscard]] double sample_mean(std::span<const double> data);
[[nodiscard]] double sample_median(std::span<const double> data);
/// Unbiased sample variance.
[[nodiscard]] double sample_variance(std::span<const double> data);
/// Linear-interpolation quantile of sorted data (R type 7).
[[nodiscard]] double interpolated_quantile(std::span<const double> sorted, double p);

/// Silverman's rule of thumb: 0.9 min(s, IQR / 1.34) n^(-1/5). Falls back to
/// s when the IQR is zero. Throws DomainError for n < 2 or zero spread.
[[nodiscard]] double silverman_bandwidth(std::span<const double> data);

/// Gaussian kernel density at x: (1 / (n h sqrt(2 pi))) sum exp(-(x - x_i)^2 / (2 h^2)).
[[nodiscard]] double kernel_density_at(std::span<const double> data, double x, double h);

/// Data-driven plug-ins for the asymptotic mean/median MSE matrix.
struct LocationPlugins {
    double s_sq = 0.0;    ///< unbiased variance
    double m_hat = 0.0;   ///< mean absolute deviation about theta0
    double f_hat = 0.0;   ///< kernel density at theta0
    double h = 0.0;       ///< bandwidth
    double theta0 = 0.0;  ///< initial estimate (the median)
    std::size_t n = 0;

    [[nodiscard]] static LocationPlugins from_data(std::span<const double> data);
};

/// W = [[s^2, m / (2 f)], [m / (2 f), 1 / (4 f^2)]]; the MSE matrix of
/// (mean, median) is approximately W / n.
[[nodiscard]] Eigen::Matrix2d laplace_w_matrix(const LocationPlugins& plugins);

/// Closed-form maximal weights on W / n: p_i / (p_1 + p_2) with
/// p_1 = 1 / (4 f) - m / 2 and p_2 = s^2 f - m / 2. Falls back to equal weights
/// (with a warning) when p_1 + p_2 vanishes.
[[nodiscard]] std::pair<double, double> location_av_weights(const LocationPlugins& plugins);

/// Bank adapter for the bootstrap machinery.
[[nodiscard]] EstimatorBank<std::span<const double>> location_bank();

}  // namespace estavg
