#include "estavg/core/averaging.hpp"
#include "estavg/core/diagnostics.hpp"
#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"
#include "estavg/weibull_bank.hpp"

#include <doctest.h>

#include <cmath>

using namespace estavg;
using doctest::Approx;

namespace {

// Weibull quantiles at the plotting positions pos(i) for i = 1..n.
template <class Pos>
std::vector<double> quasi_sample(double shape, double scale, std::size_t n, Pos pos) {
    std::vector<double> x;
    for (std::size_t i = 1; i <= n; ++i) x.push_back(quantile(Weibull{shape, scale}, pos(i, n)));
    return x;
}

double midpoint_pos(std::size_t i, std::size_t n) { return (double(i) - 0.5) / double(n); }
double mean_rank_pos(std::size_t i, std::size_t n) { return double(i) / double(n + 1); }

// Two observations with the given mean and unbiased variance.
std::vector<double> two_point(double mean, double var) {
    const double half_gap = std::sqrt(var / 2.0);
    return {mean - half_gap, mean + half_gap};
}

}  // namespace

TEST_CASE("ML on a quasi-sample") {
    const auto x = quasi_sample(2.0, 1.0, 200, midpoint_pos);
    const WeibullFit f = weibull_ml(x);
    CHECK(f.shape > 1.9);
    CHECK(f.shape < 2.1);
    CHECK(f.scale == Approx(1.0).epsilon(0.02));
    CHECK(std::abs(weibull_ml_score(x, f.shape)) < 1e-8);
}

TEST_CASE("ML on exponential data") {
    RngStream rng(3);
    const auto x = sample(Weibull{1.0, 2.0}, 5000, rng);
    const WeibullFit f = weibull_ml(x);
    // Asymptotic sd of the shape estimate is about 0.78 / sqrt(n).
    CHECK(std::abs(f.shape - 1.0) < 4.0 * 0.78 / std::sqrt(5000.0));
}

TEST_CASE("ML profile score is decreasing") {
    RngStream rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = sample(Weibull{rng.uniform(0.5, 5.0), rng.uniform(0.1, 10.0)}, 30, rng);
        double last = weibull_ml_score(x, 1e-3);
        for (double b = 2e-3; b < 1e3; b *= 1.3) {
            const double s = weibull_ml_score(x, b);
            CHECK(s < last);
            last = s;
        }
    }
}

TEST_CASE("method of moments identities") {
    const WeibullFit exp_fit = weibull_mm(two_point(2.0, 4.0));
    CHECK(exp_fit.shape == Approx(1.0).epsilon(1e-10));
    CHECK(exp_fit.scale == Approx(2.0).epsilon(1e-10));

    const double cv2 = std::tgamma(1.0 + 2.0 / 3.0) / std::pow(std::tgamma(1.0 + 1.0 / 3.0), 2) - 1.0;
    const WeibullFit three = weibull_mm(two_point(1.0, cv2));
    CHECK(three.shape == Approx(3.0).epsilon(1e-10));
    CHECK(three.scale == Approx(1.0 / std::tgamma(1.0 + 1.0 / 3.0)).epsilon(1e-10));

    CHECK_THROWS_AS((void)weibull_mm(std::vector<double>{1.0, 1.0, 1.0}), FitError);
}

TEST_CASE("OLS on mean-rank quantiles is exact") {
    for (double shape : {0.5, 1.0, 2.0, 3.0}) {
        const auto x = quasi_sample(shape, 10.0, 50, mean_rank_pos);
        CHECK(std::abs(weibull_ols(x) - shape) < 1e-9);
    }
    CHECK_THROWS_AS((void)weibull_ols(std::vector<double>{2, 2, 2}), FitError);
}

TEST_CASE("scale equivariance") {
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = sample(Weibull{3.0, 10.0}, 50, rng);
        const double c = rng.uniform(0.01, 100.0);
        std::vector<double> y = x;
        for (double& v : y) v *= c;
        const EstimatorVector tx = weibull_bank_estimates(x);
        const EstimatorVector ty = weibull_bank_estimates(y);
        for (std::size_t i = 0; i < 3; ++i) CHECK(ty[i] == Approx(tx[i]).epsilon(1e-8));
        CHECK(ty[3] == Approx(c * tx[3]).epsilon(1e-8));
    }
}

TEST_CASE("degenerate data") {
    CHECK_THROWS_AS((void)weibull_ml(std::vector<double>{1, -2, 3}), FitError);
    CHECK_THROWS_AS((void)weibull_ml(std::vector<double>{4, 4, 4, 4}), FitError);
}

TEST_CASE("bank on a quasi-sample") {
    const auto x = quasi_sample(2.0, 10.0, 500, midpoint_pos);
    const EstimatorVector t = weibull_bank_estimates(x);
    CHECK(t.group() == GroupStructure{3, 1});
    CHECK(t[0] == Approx(2.0).epsilon(0.02));
    CHECK(t[1] == Approx(2.0).epsilon(0.02));
    CHECK(t[2] == Approx(2.0).epsilon(0.05));
    CHECK(t[3] == Approx(10.0).epsilon(0.01));
    const Eigen::Vector2d center = weibull_center(t);
    CHECK(center(0) == Approx((t[0] + t[1] + t[2]) / 3.0));
    CHECK(center(1) == t[3]);
}

TEST_CASE("scale average is the ML scale plus a zero-sum shape combination") {
    RngStream rng(6);
    const auto x = sample(Weibull{3.0, 10.0}, 50, rng);
    const EstimatorVector t = weibull_bank_estimates(x);
    for (int trial = 0; trial < 20; ++trial) {
        const AveragingResult r = average(t, MseMatrix(random_spd(4, rng)), ConstraintSet::Maximal);
        const Eigen::VectorXd scale_column = r.weights.matrix().col(1);
        CHECK(scale_column(3) == Approx(1.0).epsilon(1e-12));
        CHECK(scale_column.head(3).sum() == Approx(0.0).epsilon(1e-12));
        const double zero_sum = scale_column.head(3).dot(t.values().head(3));
        CHECK(r.theta_hat(1) == Approx(t[3] + zero_sum).epsilon(1e-12));
    }
}

TEST_CASE("parametric bootstrap at the truth tracks the sampling MSE") {
    // Bootstrap at the true parameter against a direct Monte-Carlo oracle.
    const Eigen::Vector2d truth(1.0, 10.0);
    const std::size_t n = 20;
    const MseEstimate e = parametric_bootstrap_mse(weibull_simulator(), weibull_bank(), truth, 1000, n, RngStream(7));
    CHECK(e.dropped == 0);
    RngStream mc(8);
    std::array<double, 3> direct{};
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        const auto x = sample(Weibull{1.0, 10.0}, n, mc);
        const EstimatorVector t = weibull_bank_estimates(x);
        for (std::size_t i = 0; i < 3; ++i) direct[i] += (t[i] - 1.0) * (t[i] - 1.0) / reps;
    }
    // Published ML value for shape 1 at n = 20: 0.0492.
    CHECK(direct[0] == Approx(0.0492).epsilon(0.15));
    for (Eigen::Index i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(e.sigma(i, i) > 0.0);
        CHECK(e.sigma(i, i) == Approx(direct[std::size_t(i)]).epsilon(0.2));
    }
    CHECK_THROWS_AS((void)weibull_simulator()(Eigen::Vector2d(-1.0, 1.0), 5, mc), FitError);
}
