#include "estavg/core/averaging.hpp"
#include "estavg/core/diagnostics.hpp"
#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"
#include "estavg/quantile_bank.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace estavg;
using doctest::Approx;

namespace {

std::vector<double> quasi_sample(const Distribution& d, std::size_t n) {
    std::vector<double> x;
    for (std::size_t i = 1; i <= n; ++i) x.push_back(quantile(d, (double(i) - 0.5) / double(n)));
    return x;
}

}  // namespace

TEST_CASE("order-statistic quantile") {
    std::vector<double> ten(10);
    std::iota(ten.begin(), ten.end(), 1.0);
    std::reverse(ten.begin(), ten.end());
    CHECK(quantile_np(ten, 0.5) == 5.0);
    CHECK(quantile_np(ten, 0.99) == 9.0);
    CHECK(quantile_np(ten, 0.1) == 1.0);
    CHECK_THROWS_AS((void)quantile_np(ten, 0.05), DomainError);
    CHECK_THROWS_AS((void)quantile_np(ten, 1.0), DomainError);

    RngStream rng(1);
    const std::vector<double> x = sample(Gamma{2.0, 1.0}, 100, rng);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    CHECK(quantile_np(x, 0.99) == sorted[98]);
    double last = -1.0;
    for (double p = 0.01; p < 1.0; p += 0.005) {
        const double q = quantile_np(x, p);
        CHECK(q >= last);
        last = q;
    }
}

TEST_CASE("Gamma fit") {
    const GammaFit f = gamma_ml(quasi_sample(Gamma{3.0, 2.0}, 500));
    CHECK(f.shape > 2.9);
    CHECK(f.shape < 3.1);
    CHECK(f.scale == Approx(2.0).epsilon(0.03));

    RngStream rng(2);
    const auto e = sample(Weibull{1.0, 4.0}, 5000, rng);
    const GammaFit fe = gamma_ml(e);
    // Asymptotic sd of the shape estimate near 1 is about 1.24 / sqrt(n).
    CHECK(std::abs(fe.shape - 1.0) < 4.0 * 1.24 / std::sqrt(5000.0));

    CHECK_THROWS_AS((void)gamma_ml(std::vector<double>{1.0, 2.0}), FitError);
    CHECK_THROWS_AS((void)gamma_ml(std::vector<double>{1.0, 0.0, 2.0}), FitError);
    CHECK_THROWS_AS((void)gamma_ml(std::vector<double>{2.0, 2.0, 2.0}), FitError);
}

TEST_CASE("Burr fit") {
    const auto x = quasi_sample(BurrXII{2.0, 1.0}, 1000);
    const BurrFit f = burr_ml(x);
    CHECK(f.c == Approx(2.0).epsilon(0.03));
    CHECK(f.k == Approx(1.0).epsilon(0.03));

    // The fit is a local maximum of the full two-parameter likelihood.
    const double best = burr_log_likelihood(x, f.c, f.k);
    for (double dc : {-1e-3, 0.0, 1e-3}) {
        for (double dk : {-1e-3, 0.0, 1e-3}) {
            CHECK(burr_log_likelihood(x, f.c * (1.0 + dc), f.k * (1.0 + dk)) <= best + 1e-9);
        }
    }

    RngStream rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = sample(Lognormal{0.0, 1.0}, 100, rng);
        const BurrFit g = burr_ml(s);
        CHECK(g.c >= kBurrShapeLower);
        CHECK(g.c <= kBurrShapeUpper);
        CHECK(g.k > 0.0);
    }
    CHECK_THROWS_AS((void)burr_ml(std::vector<double>{3.0, 3.0, 3.0}), FitError);
    CHECK_THROWS_AS((void)burr_log_likelihood(x, -1.0, 1.0), DomainError);
}

TEST_CASE("parametric quantiles on quasi-samples") {
    const auto w = quasi_sample(Weibull{3.0, 2.0}, 1000);
    const double truth = quantile(Weibull{3.0, 2.0}, 0.99);
    CHECK(quantile_estimate(QuantileMethod::Weibull, w, 0.99) == Approx(truth).epsilon(0.01));
    const auto g = quasi_sample(Gamma{3.0, 2.0}, 1000);
    CHECK(quantile_estimate(QuantileMethod::Gamma, g, 0.99) == Approx(quantile(Gamma{3.0, 2.0}, 0.99)).epsilon(0.01));
    const auto b = quasi_sample(BurrXII{2.0, 1.0}, 1000);
    CHECK(quantile_estimate(QuantileMethod::Burr, b, 0.99) == Approx(std::sqrt(99.0)).epsilon(0.05));
}

TEST_CASE("bank layout") {
    const auto names = all_quantile_methods();
    REQUIRE(names.size() == 4);
    CHECK(to_string(names[0]) == "q_w");
    CHECK(to_string(names[1]) == "q_g");
    CHECK(to_string(names[2]) == "q_b");
    CHECK(to_string(names[3]) == "q_np");

    RngStream rng(4);
    const auto x = sample(Weibull{3.0, 2.0}, 100, rng);
    const QuantileBankResult r = quantile_bank_estimates(x, 0.99);
    CHECK(r.methods == names);
    CHECK(r.estimates.group() == GroupStructure{4});
    CHECK(r.estimates[3] == quantile_np(x, 0.99));
    const EstimatorBank<std::span<const double>> bank = quantile_bank(names, 0.99);
    CHECK(bank.evaluate(x) == r.estimates.values());
}

TEST_CASE("failed fits leave the bank") {
    // Zero breaks every parametric fit but not the order statistic.
    std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0};
    const QuantileBankResult r = quantile_bank_estimates(x, 0.9);
    REQUIRE(r.methods.size() == 1);
    CHECK(r.methods[0] == QuantileMethod::Nonparametric);
    CHECK(r.estimates[0] == 8.0);
    CHECK_THROWS_AS((void)quantile_bank(all_quantile_methods(), 0.9).evaluate(x), FitError);
    CHECK_THROWS_AS((void)quantile_bank_estimates(x, 0.05), DomainError);
}

TEST_CASE("convex average stays inside the estimates") {
    RngStream rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd t(4);
        for (Eigen::Index i = 0; i < 4; ++i) t(i) = rng.uniform(1.0, 5.0);
        const EstimatorVector tv(t, GroupStructure{4});
        const AveragingResult r = average(tv, MseMatrix(random_spd(4, rng)), ConstraintSet::Convex);
        CHECK(r.theta_hat(0) >= t.minCoeff() - 1e-12);
        CHECK(r.theta_hat(0) <= t.maxCoeff() + 1e-12);
    }
    const EstimatorVector equal(Eigen::VectorXd::Constant(4, 2.5), GroupStructure{4});
    CHECK(average(equal, MseMatrix(random_spd(4, rng)), ConstraintSet::Convex).theta_hat(0) == Approx(2.5));
}
