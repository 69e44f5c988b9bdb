#include "oracles.hpp"

#include "estavg/boolean_model.hpp"
#include "estavg/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace estavg;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

DiscSet discs(std::initializer_list<Disc> d) { return {std::vector<Disc>(d), Window{}}; }

// Moments of Beta(1, alpha) scaled to [0, 0.1].
double mean_radius(double alpha) { return 0.1 / (1.0 + alpha); }
double mean_sq_radius(double alpha) { return 0.02 / ((1.0 + alpha) * (2.0 + alpha)); }

double area_oracle(double rho, double alpha) { return 1.0 - std::exp(-kPi * rho * mean_sq_radius(alpha)); }
double perimeter_oracle(double rho, double alpha) {
    return 2.0 * kPi * rho * mean_radius(alpha) * std::exp(-kPi * rho * mean_sq_radius(alpha));
}

}  // namespace

TEST_CASE("theory values") {
    // For alpha = 1: E R = 0.05 and E R^2 = 0.01 / 3.
    CHECK(mean_sq_radius(1.0) == Approx(0.01 / 3.0));
    CHECK(area_oracle(50.0, 1.0) == Approx(1.0 - std::exp(-50.0 * kPi / 300.0)));
    CHECK(area_oracle(50.0, 1.0) == Approx(0.4076).epsilon(1e-3));
    CHECK(perimeter_oracle(50.0, 1.0) == Approx(9.305).epsilon(1e-3));
    for (double rho : {25.0, 50.0, 100.0, 150.0}) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            CHECK(boolean_area_theory(rho, alpha) == Approx(area_oracle(rho, alpha)));
            CHECK(boolean_perimeter_theory(rho, alpha) == Approx(perimeter_oracle(rho, alpha)));
        }
    }
}

TEST_CASE("closed-form estimators invert the theory") {
    for (auto [rho, alpha] : {std::pair{50.0, 1.0}, std::pair{100.0, 2.0}, std::pair{25.0, 0.5}}) {
        const double a = area_oracle(rho, alpha);
        const double p = perimeter_oracle(rho, alpha);
        // The alpha identity: P / ((A - 1) log(1 - A)) / 10 - 2 = alpha.
        CHECK(p / ((a - 1.0) * std::log(1.0 - a)) / 10.0 - 2.0 == Approx(alpha).epsilon(1e-12));
        const IntensityShape est = estimators_rho1_alpha1(a, p);
        CHECK(std::abs(est.rho - rho) < 1e-9 * rho);
        CHECK(std::abs(est.alpha - alpha) < 1e-9);
    }
    CHECK_THROWS_AS((void)estimators_rho1_alpha1(0.0, 1.0), FitError);
    CHECK_THROWS_AS((void)estimators_rho1_alpha1(1.0, 1.0), FitError);
    CHECK_THROWS_AS((void)estimators_rho1_alpha1(0.5, 0.0), FitError);
}

TEST_CASE("area fraction") {
    CHECK(area_fraction(discs({})) == 0.0);
    const double one = area_fraction(discs({{{0.5, 0.5}, 0.1}}));
    CHECK(std::abs(one - kPi * 0.01) <= 2.0 / 1024.0);
    const double quarter = area_fraction(discs({{{0.0, 0.0}, 0.1}}), 512);
    CHECK(std::abs(quarter - kPi * 0.01 / 4.0) <= 2.0 / 512.0);
    CHECK_THROWS_AS((void)area_fraction(discs({}), 32), DomainError);
}

TEST_CASE("perimeter") {
    CHECK(perimeter_per_area(discs({})) == 0.0);
    CHECK(perimeter_per_area(discs({{{0.5, 0.5}, 0.07}})) == Approx(2.0 * kPi * 0.07).epsilon(1e-12));
    CHECK(perimeter_per_area(discs({{{0.5, 0.5}, 0.07}, {{0.5, 0.5}, 0.07}})) ==
          Approx(2.0 * kPi * 0.07).epsilon(1e-12));
    // A disc inside a larger one has no exposed boundary.
    CHECK(perimeter_per_area(discs({{{0.5, 0.5}, 0.02}, {{0.51, 0.5}, 0.08}})) ==
          Approx(2.0 * kPi * 0.08).epsilon(1e-12));
    // Half of a circle centred on the bottom edge lies inside.
    CHECK(perimeter_per_area(discs({{{0.5, 0.0}, 0.1}})) == Approx(kPi * 0.1).epsilon(1e-12));
    // Quarter at a corner.
    CHECK(perimeter_per_area(discs({{{1.0, 1.0}, 0.1}})) == Approx(kPi * 0.1 / 2.0).epsilon(1e-12));
    // Two discs of radius 0.1 with centres 0.1 apart:
    // each loses the arc of half-angle acos(0.5) = pi / 3.
    const double lens = perimeter_per_area(discs({{{0.45, 0.5}, 0.1}, {{0.55, 0.5}, 0.1}}));
    CHECK(lens == Approx(2.0 * 0.1 * (2.0 * kPi - 2.0 * kPi / 3.0)).epsilon(1e-12));
    // Disjoint discs add up.
    const double sum = perimeter_per_area(discs({{{0.2, 0.2}, 0.05}, {{0.7, 0.7}, 0.09}, {{0.2, 0.8}, 0.01}}));
    CHECK(std::abs(sum - 2.0 * kPi * (0.05 + 0.09 + 0.01)) < 1e-12);
}

TEST_CASE("measurements ignore disc order") {
    RngStream rng(5);
    DiscSet set = simulate_boolean(80.0, 1.0, Window{}, rng);
    const double a = area_fraction(set, 256);
    const double p = perimeter_per_area(set);
    const std::size_t n = tangent_count(set, {0.3, -1.0});
    std::reverse(set.discs.begin(), set.discs.end());
    CHECK(area_fraction(set, 256) == a);
    CHECK(perimeter_per_area(set) == Approx(p).epsilon(1e-12));
    CHECK(tangent_count(set, {0.3, -1.0}) == n);
}

TEST_CASE("tangent counts") {
    const DiscSet single = discs({{{0.5, 0.5}, 0.1}});
    for (double angle = 0.0; angle < 2.0 * kPi; angle += 0.3) {
        CHECK(tangent_count(single, {std::cos(angle), std::sin(angle)}) == 1);
    }
    const DiscSet pair = discs({{{0.4, 0.5}, 0.1}, {{0.5, 0.5}, 0.1}});
    CHECK(tangent_count(pair, {1.0, 0.0}) == 1);
    CHECK(tangent_count(pair, {-1.0, 0.0}) == 1);
    CHECK(tangent_count(pair, {0.0, 1.0}) == 2);
    CHECK(tangent_count(discs({{{0.5, 0.5}, 0.02}, {{0.5, 0.5}, 0.08}}), {1.0, 1.0}) == 1);
    CHECK(tangent_count(discs({{{0.5, 0.5}, 0.05}, {{0.5, 0.5}, 0.05}}), {0.0, 1.0}) == 1);
    // The extreme point leaves the window.
    CHECK(tangent_count(discs({{{0.05, 0.5}, 0.1}}), {1.0, 0.0}) == 0);
    CHECK_THROWS_AS((void)tangent_count(single, {0.0, 0.0}), DomainError);
}

TEST_CASE("second intensity estimator on simple sets") {
    RngStream rng(6);
    CHECK(estimator_rho2(discs({}), 0.0, 10, rng) == 0.0);
    const double r = 0.08;
    const double a = kPi * r * r;
    CHECK(estimator_rho2(discs({{{0.5, 0.5}, r}}), a, 37, rng) == Approx(1.0 / (1.0 - a)));
    CHECK_THROWS_AS((void)estimator_rho2(discs({}), 0.0, 0, rng), DomainError);
}

TEST_CASE("simulation") {
    RngStream rng(7);
    std::vector<double> counts;
    std::vector<double> radii1;
    std::vector<double> radii2;
    for (int rep = 0; rep < 2000; ++rep) {
        const DiscSet set = simulate_boolean(50.0, 1.0, Window{}, rng);
        counts.push_back(double(set.discs.size()));
        for (const Disc& d : set.discs) {
            radii1.push_back(d.radius);
            CHECK(d.radius <= kMaxGrainRadius);
            CHECK(d.radius > 0.0);
            CHECK(Window{}.dilated(kMaxGrainRadius).contains(d.center));
        }
        if (rep < 300) {
            for (const Disc& d : simulate_boolean(50.0, 2.0, Window{}, rng).discs) radii2.push_back(d.radius);
        }
    }
    // Germ count is Poisson with mean 50 * 1.2^2 = 72.
    const oracle::MeanSe c = oracle::mean_se(counts);
    CHECK(std::abs(c.mean - 72.0) <= 4.0 * std::sqrt(72.0 / 2000.0));
    const oracle::MeanSe r1 = oracle::mean_se(radii1);
    CHECK(std::abs(r1.mean - mean_radius(1.0)) <= 4.0 * r1.se);
    const oracle::MeanSe r2 = oracle::mean_se(radii2);
    CHECK(std::abs(r2.mean - mean_radius(2.0)) <= 4.0 * r2.se);

    RngStream p(8);
    double total = 0.0;
    for (int i = 0; i < 2000; ++i) total += double(draw_poisson(3.5, p));
    CHECK(total / 2000.0 == Approx(3.5).epsilon(0.05));
    double big = 0.0;
    for (int i = 0; i < 200; ++i) big += double(draw_poisson(2000.0, p));
    CHECK(big / 200.0 == Approx(2000.0).epsilon(0.01));
}

TEST_CASE("Monte-Carlo means match the area and perimeter formulas") {
    for (double rho : {25.0, 50.0}) {
        RngStream rng(9, std::uint64_t(rho));
        std::vector<double> areas;
        std::vector<double> perimeters;
        for (int rep = 0; rep < 2000; ++rep) {
            const DiscSet set = simulate_boolean(rho, 1.0, Window{}, rng);
            // Pixel-centre coverage is unbiased for the area fraction at any
            // resolution, so a coarse grid is enough here.
            areas.push_back(area_fraction(set, 128));
            perimeters.push_back(perimeter_per_area(set));
        }
        const oracle::MeanSe a = oracle::mean_se(areas);
        const oracle::MeanSe p = oracle::mean_se(perimeters);
        CAPTURE(rho);
        CHECK(std::abs(a.mean - area_oracle(rho, 1.0)) <= 4.0 * a.se);
        CHECK(std::abs(p.mean - perimeter_oracle(rho, 1.0)) <= 4.0 * p.se);
    }
}

TEST_CASE("second intensity estimator is consistent and direction-shift invariant") {
    RngStream rng(10);
    std::vector<double> rho2;
    std::vector<double> shift_diff;
    for (int rep = 0; rep < 800; ++rep) {
        const DiscSet set = simulate_boolean(50.0, 1.0, Window{}, rng);
        const double a = area_fraction(set, 256);
        double plain = 0.0;
        double shifted = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double angle = rng.uniform(0.0, 2.0 * kPi);
            plain += double(tangent_count(set, {std::cos(angle), std::sin(angle)}));
            shifted += double(tangent_count(set, {std::cos(angle + 1.234), std::sin(angle + 1.234)}));
        }
        plain /= 20.0 * (1.0 - a);
        shifted /= 20.0 * (1.0 - a);
        rho2.push_back(plain);
        shift_diff.push_back(plain - shifted);
    }
    const oracle::MeanSe r = oracle::mean_se(rho2);
    CHECK(std::abs(r.mean - 50.0) <= 4.0 * r.se);
    const oracle::MeanSe d = oracle::mean_se(shift_diff);
    CHECK(std::abs(d.mean) <= 4.0 * d.se);
}

TEST_CASE("bank, centre and simulator") {
    const BooleanOptions options{256, 50};
    const ModelSimulator<BooleanObservation> sim = boolean_simulator(Window{});
    RngStream rng(11);
    const BooleanObservation obs = sim(Eigen::Vector2d(50.0, 1.0), 0, rng);
    const EstimatorVector t = boolean_bank_estimates(obs, options);
    CHECK(t.group() == GroupStructure{2, 1});
    CHECK(t[0] > 0.0);
    CHECK(t[1] > 0.0);
    const Eigen::Vector2d centre = boolean_center(t);
    CHECK(centre(0) == Approx(0.5 * (t[0] + t[1])));
    CHECK(centre(1) == t[2]);
    CHECK(boolean_bank(options).evaluate(obs) == t.values());

    RngStream again(11);
    CHECK(boolean_bank_estimates(sim(Eigen::Vector2d(50.0, 1.0), 0, again), options).values() == t.values());
    CHECK_THROWS_AS((void)sim(Eigen::Vector2d(-1.0, 1.0), 0, rng), FitError);
    CHECK_THROWS_AS((void)sim(Eigen::Vector2d(50.0, 0.0), 0, rng), FitError);
}

TEST_CASE("disc export") {
    std::ostringstream os;
    write_discs(os, discs({{{0.25, 0.5}, 0.1}, {{0.75, 0.125}, 0.05}}));
    std::istringstream is(os.str());
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
    REQUIRE(static_cast<bool>(is >> x >> y >> r));
    CHECK(x == 0.25);
    CHECK(y == 0.5);
    CHECK(r == 0.1);
    REQUIRE(static_cast<bool>(is >> x >> y >> r));
    CHECK(r == 0.05);
    CHECK_FALSE(static_cast<bool>(is >> x));
}
