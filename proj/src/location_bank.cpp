#include "estavg/location_bank.hpp"

#include "estavg/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace estavg {

double sample_mean(std::span<const double> data) {
    if (data.empty()) throw DomainError("mean of empty sample");
    return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

double sample_median(std::span<const double> data) {
    if (data.empty()) throw DomainError("median of empty sample");
    std::vector<double> v(data.begin(), data.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double sample_variance(std::span<const double> data) {
    if (data.size() < 2) throw DomainError("variance needs at least two observations");
    const double mean = sample_mean(data);
    double ss = 0.0;
    for (double x : data) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(data.size() - 1);
}

double interpolated_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DomainError("quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EstimatorVector mean_median_bank(std::span<const double> data) {
    if (data.size() < 2) throw DomainError("mean/median bank needs n >= 2");
    return EstimatorVector(Eigen::Vector2d(sample_mean(data), sample_median(data)), GroupStructure{2});
}

double silverman_bandwidth(std::span<const double> data) {
    const double s = std::sqrt(sample_variance(data));
    if (!(s > 0.0)) throw DomainError("bandwidth undefined for a sample with zero spread");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = interpolated_quantile(sorted, 0.75) - interpolated_quantile(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(s, iqr / 1.34) : s;
    return 0.9 * spread * std::pow(static_cast<double>(data.size()), -0.2);
}

double kernel_density_at(std::span<const double> data, double x, double h) {
    if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
    if (data.empty()) throw DomainError("density of empty sample");
    double acc = 0.0;
    for (double xi : data) {
        const double z = (x - xi) / h;
        acc += std::exp(-0.5 * z * z);
    }
    return acc / (static_cast<double>(data.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

LocationPlugins LocationPlugins::from_data(std::span<const double> data) {
    LocationPlugins p;
    p.n = data.size();
    p.theta0 = sample_median(data);
    p.s_sq = sample_variance(data);
    double abs_dev = 0.0;
    for (double x : data) abs_dev += std::abs(x - p.theta0);
    p.m_hat = abs_dev / static_cast<double>(data.size());
    p.h = silverman_bandwidth(data);
    p.f_hat = kernel_density_at(data, p.theta0, p.h);
    return p;
}

Eigen::Matrix2d laplace_w_matrix(const LocationPlugins& plugins) {
    if (!(plugins.f_hat > 0.0)) throw DomainError("density plug-in must be positive");
    const double cross = plugins.m_hat / (2.0 * plugins.f_hat);
    Eigen::Matrix2d w;
    w << plugins.s_sq, cross, cross, 1.0 / (4.0 * plugins.f_hat * plugins.f_hat);
    return w;
}

std::pair<double, double> location_av_weights(const LocationPlugins& plugins) {
    const double p1 = 1.0 / (4.0 * plugins.f_hat) - plugins.m_hat / 2.0;
    const double p2 = plugins.s_sq * plugins.f_hat - plugins.m_hat / 2.0;
    const double total = p1 + p2;
    if (std::abs(total) <= 1e-14 || !std::isfinite(total)) {
        spdlog::warn("location weights: p1 + p2 = {} is degenerate, using equal weights", total);
        return {0.5, 0.5};
    }
    return {p1 / total, p2 / total};
}

EstimatorBank<std::span<const double>> location_bank() {
    return {GroupStructure{2}, [](const std::span<const double>& data) -> Eigen::VectorXd {
                return mean_median_bank(data).values();
            }};
}

}  // namespace estavg
