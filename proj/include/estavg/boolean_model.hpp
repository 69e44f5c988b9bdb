#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/mse_estimation.hpp"
#include "estavg/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace estavg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Disc {
    Point center;
    double radius = 0.0;
};

/// Axis-aligned observation window.
struct Window {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    [[nodiscard]] double width() const noexcept { return x1 - x0; }
    [[nodiscard]] double height() const noexcept { return y1 - y0; }
    [[nodiscard]] double area() const noexcept { return width() * height(); }
    [[nodiscard]] bool contains(Point p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    [[nodiscard]] Window dilated(double r) const noexcept { return {x0 - r, y0 - r, x1 + r, y1 + r}; }
};

/// Grains of one Boolean-model realisation, with centers in the window
/// dilated by the maximal radius.
struct DiscSet {
    std::vector<Disc> discs;
    Window window;
};

inline constexpr double kMaxGrainRadius = 0.1;

/// Germs: Poisson(rho |W + r_max|) points uniform on the dilated window.
/// Radii: iid Beta(1, alpha) scaled to [0, 0.1].
[[nodiscard]] DiscSet simulate_boolean(double rho, double alpha, const Window& window, RngStream& rng);

/// Poisson variate (sum of exponential gaps; large means split in halves).
[[nodiscard]] std::size_t draw_poisson(double mean, RngStream& rng);

/// Fraction of the resolution x resolution pixel centers of the window
/// covered by at least one disc. Throws DomainError for resolution < 64.
[[nodiscard]] double area_fraction(const DiscSet& set, std::size_t resolution = 1024);

/// Exposed boundary length inside the window per unit window area, computed
/// exactly from arc exposure. Of two coincident circles, the lower index keeps
/// its arc.
[[nodiscard]] double perimeter_per_area(const DiscSet& set);

/// Number of grains whose extreme point c - r u/|u| lies in the window and is
/// not strictly inside another grain. Throws DomainError for u = 0.
[[nodiscard]] std::size_t tangent_count(const DiscSet& set, Point u);

struct BooleanMeasurements {
    double a_obs = 0.0;
    double p_obs = 0.0;
    std::vector<double> directions;  ///< angles in [0, 2 pi)
    std::vector<std::size_t> tangent_counts;
};

struct BooleanOptions {
    std::size_t resolution = 1024;
    std::size_t n_directions = 100;
};

[[nodiscard]] BooleanMeasurements measure_boolean(const DiscSet& set, const BooleanOptions& options,
                                                  RngStream& direction_rng);

struct IntensityShape {
    double rho = 0.0;
    double alpha = 0.0;
};

/// alpha1 = P / (10 (A - 1) log(1 - A)) - 2 and rho1 = 5 (alpha1 + 1) P / (pi (1 - A)).
/// Throws FitError unless 0 < a_obs < 1 and p_obs > 0.
[[nodiscard]] IntensityShape estimators_rho1_alpha1(double a_obs, double p_obs);

/// rho2 = mean N(u_i) / (|W| (1 - A)) over n_directions uniform directions.
[[nodiscard]] double estimator_rho2(const DiscSet& set, double a_obs, std::size_t n_directions, RngStream& rng);
[[nodiscard]] double estimator_rho2(const BooleanMeasurements& m, double window_area);

/// Theoretical area fraction and perimeter density for Beta(1, alpha) radii.
[[nodiscard]] double boolean_area_theory(double rho, double alpha);
[[nodiscard]] double boolean_perimeter_theory(double rho, double alpha);

/// A realisation plus the stream its tangent directions are drawn from.
struct BooleanObservation {
    DiscSet discs;
    RngStream directions;
};

/// (rho1, rho2, alpha1) with groups (2, 1).
[[nodiscard]] EstimatorVector boolean_bank_estimates(const BooleanObservation& obs, const BooleanOptions& options);
[[nodiscard]] EstimatorBank<BooleanObservation> boolean_bank(const BooleanOptions& options);
/// Plug-in parameter: (0.5 (rho1 + rho2), alpha1).
[[nodiscard]] Eigen::Vector2d boolean_center(const EstimatorVector& t);
/// Simulator for parameter (rho, alpha) on `window`; the sample size is ignored.
[[nodiscard]] ModelSimulator<BooleanObservation> boolean_simulator(const Window& window);

/// Plain-text export, one "cx cy r" row per disc.
void write_discs(std::ostream& os, const DiscSet& set);

}  // namespace estavg
