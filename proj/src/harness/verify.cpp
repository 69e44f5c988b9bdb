#include "estavg/harness/verify.hpp"

#include "estavg/core/averaging.hpp"
#include "estavg/core/diagnostics.hpp"
#include "estavg/core/weights.hpp"
#include "estavg/location_bank.hpp"
#include "estavg/mse_estimation.hpp"
#include "estavg/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>

namespace estavg::harness {

namespace {

constexpr ConstraintSet kAllSets[] = {ConstraintSet::Maximal, ConstraintSet::ComponentWise, ConstraintSet::Convex,
                                      ConstraintSet::Selection};
constexpr ConstraintSet kConvexSets[] = {ConstraintSet::Maximal, ConstraintSet::ComponentWise, ConstraintSet::Convex};

GroupStructure random_group(RngStream& rng) {
    const std::size_t d = 1 + rng.below(3);
    std::vector<std::size_t> sizes(d);
    for (auto& s : sizes) s = 1 + rng.below(4);
    return GroupStructure(sizes);
}

std::string fmt_max(const char* label, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s = %.3g", label, v);
    return buf;
}

// Runs `body` over trials; body returns the violation for that trial (<= 0 is fine).
CheckResult run_check(std::string name, std::size_t trials, const RngStream& base, const char* label,
                      const std::function<double(RngStream&)>& body) {
    CheckResult r{std::move(name), true, {}};
    double worst = -std::numeric_limits<double>::infinity();
    try {
        for (std::size_t t = 0; t < trials; ++t) {
            RngStream rng = base.child(t);
            worst = std::max(worst, body(rng));
        }
        r.passed = worst <= 0.0;
        r.detail = fmt_max(label, worst);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

double relative_excess(double value, double bound) { return value - bound - 1e-9 * std::max(1.0, std::abs(bound)); }

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t seed, std::size_t trials) {
    const RngStream root(seed, 0x5eed);
    std::vector<CheckResult> out;

    out.push_back(run_check("selector layout", trials, root.child(1), "max entry error", [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const Eigen::MatrixXd j = build_selector(g);
        Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(j.cols(), j.cols());
        for (std::size_t c = 0; c < g.parameters(); ++c) {
            expect(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = static_cast<double>(g.size(c));
        }
        const double row_err = (j.rowwise().sum().array() - 1.0).abs().maxCoeff();
        return std::max(row_err, (j.transpose() * j - expect).cwiseAbs().maxCoeff()) - 0.0;
    }));

    out.push_back(run_check("weights feasible in every set", trials, root.child(2), "max violation",
                            [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const MseMatrix sigma(random_spd(static_cast<Eigen::Index>(g.estimators()), rng));
        double worst = 0.0;
        for (ConstraintSet cs : kAllSets) {
            const Eigen::MatrixXd w = solve_weights(cs, sigma, g).matrix();
            worst = std::max(worst, WeightMatrix::constraint_residual(w, g) - WeightMatrix::kTolerance);
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                for (Eigen::Index c = 0; c < w.cols(); ++c) {
                    const bool own = g.group_of(static_cast<std::size_t>(i)) == static_cast<std::size_t>(c);
                    if (cs != ConstraintSet::Maximal && !own) worst = std::max(worst, std::abs(w(i, c)));
                    if (cs == ConstraintSet::Convex || cs == ConstraintSet::Selection) {
                        worst = std::max(worst, -w(i, c) - 1e-12);
                    }
                    if (cs == ConstraintSet::Selection) {
                        worst = std::max(worst, std::min(std::abs(w(i, c)), std::abs(w(i, c) - 1.0)));
                    }
                }
            }
        }
        return worst;
    }));

    out.push_back(run_check("solver beats random feasible weights", trials, root.child(3), "max excess risk",
                            [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const MseMatrix sigma(random_spd(static_cast<Eigen::Index>(g.estimators()), rng));
        double worst = -1.0;
        for (ConstraintSet cs : kAllSets) {
            const double best = risk_trace(solve_weights(cs, sigma, g), sigma);
            for (int s = 0; s < 20; ++s) {
                const double other = risk_trace(random_feasible_weights(cs, g, rng), sigma.matrix());
                worst = std::max(worst, relative_excess(best, other));
            }
        }
        return worst;
    }));

    out.push_back(run_check("risk nondecreasing maximal < componentwise < convex < selection", trials, root.child(4),
                            "max inversion", [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const MseMatrix sigma(random_spd(static_cast<Eigen::Index>(g.estimators()), rng));
        double prev = 0.0;
        double worst = -1.0;
        for (ConstraintSet cs : kAllSets) {
            const double risk = risk_trace(solve_weights(cs, sigma, g), sigma);
            worst = std::max(worst, relative_excess(prev, risk));
            prev = risk;
        }
        return worst;
    }));

    out.push_back(run_check("convex enumeration matches projected gradient", trials, root.child(5),
                            "max weight gap - 1e-6", [](RngStream& rng) {
        const auto k = static_cast<Eigen::Index>(1 + rng.below(8));
        const Eigen::MatrixXd block = random_spd(k, rng);
        const Eigen::VectorXd a = detail::simplex_weights_enumerate(block);
        const Eigen::VectorXd b = detail::simplex_weights_iterative(block);
        return (a - b).cwiseAbs().maxCoeff() - 1e-6;
    }));

    out.push_back(run_check("sampled divergence below its operator bound", trials, root.child(6), "max excess",
                            [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const auto k = static_cast<Eigen::Index>(g.estimators());
        const MseMatrix a(random_spd(k, rng));
        const MseMatrix b(a.matrix() + 0.3 * random_spd(k, rng));
        const double bound = divergence_upper_bound(a, b);
        double worst = -1.0;
        for (ConstraintSet cs : kAllSets) {
            worst = std::max(worst, relative_excess(divergence_sampled(a, b, cs, g, 50, rng), bound));
        }
        return worst;
    }));

    out.push_back(run_check("averaged estimate within the oracle-distance bound", trials, root.child(7),
                            "max excess", [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const auto k = static_cast<Eigen::Index>(g.estimators());
        const Eigen::MatrixXd sigma = random_spd(k, rng);
        const MseMatrix truth(sigma);
        const MseMatrix estimate(sigma + 0.5 * random_spd(k, rng));
        Eigen::VectorXd z(k);
        for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
        const Eigen::VectorXd error = spd_sqrt(sigma) * z;
        const EstimatorVector t(error, g);
        const double delta = divergence_upper_bound(estimate, truth);
        const double s_sq = sigma.llt().matrixL().solve(error).squaredNorm();
        double worst = -1.0;
        for (ConstraintSet cs : kConvexSets) {
            const WeightMatrix oracle = solve_weights(cs, truth, g);
            const WeightMatrix fitted = solve_weights(cs, estimate, g);
            const double gap = (combine(t, fitted) - combine(t, oracle)).squaredNorm();
            worst = std::max(worst, relative_excess(gap, theorem1_bound(delta, s_sq, risk_trace(oracle, truth))));
        }
        return worst;
    }));

    out.push_back(run_check("equal estimates average to their common value", trials, root.child(8), "max error",
                            [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const auto d = static_cast<Eigen::Index>(g.parameters());
        Eigen::VectorXd theta(d);
        for (Eigen::Index j = 0; j < d; ++j) theta(j) = 10.0 * rng.normal();
        const EstimatorVector t(build_selector(g) * theta, g);
        const MseMatrix sigma(random_spd(static_cast<Eigen::Index>(g.estimators()), rng));
        double worst = 0.0;
        for (ConstraintSet cs : kAllSets) {
            worst = std::max(worst, (combine(t, solve_weights(cs, sigma, g)) - theta).cwiseAbs().maxCoeff());
        }
        return worst - 1e-9 * (1.0 + theta.cwiseAbs().maxCoeff());
    }));

    out.push_back(run_check("convex average inside the group range", trials, root.child(9), "max excursion",
                            [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const auto k = static_cast<Eigen::Index>(g.estimators());
        Eigen::VectorXd v(k);
        for (Eigen::Index i = 0; i < k; ++i) v(i) = rng.normal();
        const EstimatorVector t(v, g);
        const Eigen::VectorXd theta = combine(t, solve_weights_convex(MseMatrix(random_spd(k, rng)), g));
        double worst = -1.0;
        for (std::size_t j = 0; j < g.parameters(); ++j) {
            const auto seg = v.segment(static_cast<Eigen::Index>(g.offset(j)), static_cast<Eigen::Index>(g.size(j)));
            const double x = theta(static_cast<Eigen::Index>(j));
            worst = std::max({worst, seg.minCoeff() - x - 1e-12, x - seg.maxCoeff() - 1e-12});
        }
        return worst;
    }));

    out.push_back(run_check("SPD repair of singular input", trials, root.child(10), "min eigenvalue deficit",
                            [](RngStream& rng) {
        const auto k = static_cast<Eigen::Index>(2 + rng.below(5));
        Eigen::VectorXd u(k);
        for (Eigen::Index i = 0; i < k; ++i) u(i) = rng.normal();
        const MseMatrix m(u * u.transpose());
        const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.matrix()).eigenvalues().minCoeff();
        const double asym = (m.matrix() - m.matrix().transpose()).cwiseAbs().maxCoeff();
        return std::max(asym, m.ridge() > 0.0 && lo > 0.0 ? -1.0 : 1.0);
    }));

    out.push_back(run_check("intervals contain the estimate and widen with level", trials, root.child(11),
                            "max violation", [](RngStream& rng) {
        const GroupStructure g = random_group(rng);
        const auto k = static_cast<Eigen::Index>(g.estimators());
        Eigen::VectorXd v(k);
        for (Eigen::Index i = 0; i < k; ++i) v(i) = rng.normal();
        const EstimatorVector t(v, g);
        const MseMatrix sigma(random_spd(k, rng));
        const AveragingResult narrow = average(t, sigma, ConstraintSet::Maximal, 0.8);
        const AveragingResult wide = average(t, sigma, ConstraintSet::Maximal, 0.95);
        double worst = -1.0;
        for (std::size_t j = 0; j < g.parameters(); ++j) {
            const double x = narrow.theta_hat(static_cast<Eigen::Index>(j));
            worst = std::max({worst, narrow.intervals[j].low - x, x - narrow.intervals[j].high,
                              -narrow.component_risks(static_cast<Eigen::Index>(j)),
                              (narrow.intervals[j].high - narrow.intervals[j].low) -
                                  (wide.intervals[j].high - wide.intervals[j].low)});
        }
        return worst;
    }));

    out.push_back(run_check("location closed form equals maximal solver", trials, root.child(12), "max weight gap",
                            [](RngStream& rng) {
        LocationPlugins p;
        p.n = 10 + rng.below(200);
        p.s_sq = rng.uniform(0.2, 5.0);
        p.m_hat = rng.uniform(0.05, 0.95) * std::sqrt(p.s_sq);
        p.f_hat = rng.uniform(0.05, 1.0);
        const auto [w_mean, w_median] = location_av_weights(p);
        const MseMatrix sigma(laplace_w_matrix(p) / static_cast<double>(p.n));
        const WeightMatrix w = solve_weights_maximal(sigma, GroupStructure{2});
        return std::max(std::abs(w(0, 0) - w_mean), std::abs(w(1, 0) - w_median)) - 1e-10;
    }));

    out.push_back(run_check("bootstrap is a pure function of the stream", std::max<std::size_t>(trials / 20, 1),
                            root.child(13), "max difference", [](RngStream& rng) {
        std::vector<double> x(40);
        for (double& v : x) v = rng.normal();
        const RngStream stream = rng.child(99);
        const EstimatorVector t = mean_median_bank(x);
        const MseEstimate a = nonparametric_bootstrap_mse(std::span<const double>(x), location_bank(), t.values(), 50, stream);
        const MseEstimate b = nonparametric_bootstrap_mse(std::span<const double>(x), location_bank(), t.values(), 50, stream);
        return (a.sigma.matrix() - b.sigma.matrix()).cwiseAbs().maxCoeff() > 0.0 ? 1.0 : 0.0;
    }));

    return out;
}

}  // namespace estavg::harness
