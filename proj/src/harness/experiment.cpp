#include "estavg/harness/experiment.hpp"

#include "estavg/boolean_model.hpp"
#include "estavg/core/averaging.hpp"
#include "estavg/core/diagnostics.hpp"
#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"
#include "estavg/location_bank.hpp"
#include "estavg/mse_estimation.hpp"
#include "estavg/quantile_bank.hpp"
#include "estavg/rng.hpp"
#include "estavg/weibull_bank.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace estavg::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Distribution location_distribution(const ExperimentConfig& c) {
    if (c.family == "gauss") return Gaussian{0.0, 1.0};
    if (c.family == "cauchy") return Cauchy{0.0, 1.0};
    if (c.family == "student") return Student{c.nu};
    if (c.family == "logistic") return Logistic{0.0, 1.0};
    return GaussianMixture{2.0};
}

Distribution quantile_distribution(const ExperimentConfig& c) {
    if (c.family == "weibull") return Weibull{3.0, 2.0};
    if (c.family == "gamma") return Gamma{3.0, 2.0};
    if (c.family == "burr") return BurrXII{2.0, 1.0};
    return Lognormal{0.0, 1.0};
}

// The true MSE matrix of the synthetic study, fixed by the seed alone.
Eigen::MatrixXd synthetic_sigma(const ExperimentConfig& c) {
    std::size_t k = 0;
    for (std::size_t s : c.sizes) k += s;
    RngStream setup(c.seed, 1);
    return random_spd(static_cast<Eigen::Index>(k), setup);
}

ReplicationRecord blank_record(const StudyLayout& layout, std::size_t index) {
    ReplicationRecord r;
    r.index = index;
    r.values.assign(layout.names.size(), kNaN);
    r.risks.assign(layout.names.size(), kNaN);
    r.hits.assign(layout.names.size(), -1);
    r.extras.assign(layout.extras.size(), kNaN);
    return r;
}

void store_average(ReplicationRecord& r, const StudyLayout& layout, std::size_t row, const AveragingResult& res,
                   Eigen::Index j) {
    r.values[row] = res.theta_hat(j);
    r.risks[row] = res.component_risks(j);
    if (!res.intervals.empty()) {
        r.hits[row] = res.intervals[static_cast<std::size_t>(j)].contains(layout.truths[row]) ? 1 : 0;
    }
}

void location_replicate(const ExperimentConfig& c, const StudyLayout& layout, RngStream& rs, ReplicationRecord& r) {
    RngStream data_rng = rs.child(0);
    const std::vector<double> x = sample(location_distribution(c), c.n, data_rng);
    const std::span<const double> xs(x);
    const EstimatorVector t = mean_median_bank(xs);
    r.values[0] = t[0];
    r.values[1] = t[1];

    auto bootstrap = [&] {
        const MseEstimate est = nonparametric_bootstrap_mse(xs, location_bank(), t.values(), c.boot, rs.child(1));
        r.boot_dropped += est.dropped;
        return est.sigma;
    };
    std::optional<MseMatrix> boot_sigma;
    if (c.sigma_method == SigmaMethod::Plugin) {
        const LocationPlugins plugins = LocationPlugins::from_data(xs);
        const MseMatrix sigma(laplace_w_matrix(plugins) / static_cast<double>(c.n));
        store_average(r, layout, 2, average(t, sigma, c.constraint, c.level), 0);
    } else {
        boot_sigma = bootstrap();
        store_average(r, layout, 2, average(t, *boot_sigma, c.constraint, c.level), 0);
    }
    if (c.avb) {
        if (!boot_sigma) boot_sigma = bootstrap();
        store_average(r, layout, 3, average(t, *boot_sigma, c.constraint, c.level), 0);
    }
}

void weibull_replicate(const ExperimentConfig& c, const StudyLayout& layout, RngStream& rs, ReplicationRecord& r) {
    RngStream data_rng = rs.child(0);
    const std::vector<double> x = sample(Weibull{c.beta, c.eta}, c.n, data_rng);
    const std::span<const double> xs(x);
    const EstimatorVector t = weibull_bank_estimates(xs);
    const MseEstimate est =
        c.sigma_method == SigmaMethod::PBoot
            ? parametric_bootstrap_mse(weibull_simulator(), weibull_bank(), Eigen::VectorXd(weibull_center(t)), c.boot,
                                       c.n, rs.child(1))
            : nonparametric_bootstrap_mse(xs, weibull_bank(), t.values(), c.boot, rs.child(1));
    r.boot_dropped = est.dropped;
    const AveragingResult res = average(t, est.sigma, c.constraint, c.level);
    r.values[0] = t[0];
    r.values[1] = t[1];
    r.values[2] = t[2];
    store_average(r, layout, 3, res, 0);
    r.values[4] = t[3];
    store_average(r, layout, 5, res, 1);
}

void boolean_replicate(const ExperimentConfig& c, const StudyLayout& layout, RngStream& rs, ReplicationRecord& r) {
    const Window window{};
    const BooleanOptions options{c.resolution, c.directions};
    RngStream data_rng = rs.child(0);
    const BooleanObservation obs = boolean_simulator(window)(Eigen::Vector2d(c.rho, c.alpha), 0, data_rng);
    RngStream directions = obs.directions;
    const BooleanMeasurements m = measure_boolean(obs.discs, options, directions);
    r.extras[0] = m.a_obs;
    r.extras[1] = m.p_obs;

    const IntensityShape first = estimators_rho1_alpha1(m.a_obs, m.p_obs);
    const double rho2 = estimator_rho2(m, window.area());
    const EstimatorVector t(Eigen::Vector3d(first.rho, rho2, first.alpha), GroupStructure{2, 1});
    const MseEstimate est = parametric_bootstrap_mse(boolean_simulator(window), boolean_bank(options),
                                                     Eigen::VectorXd(boolean_center(t)), c.boot, 0, rs.child(1));
    r.boot_dropped = est.dropped;
    const AveragingResult res = average(t, est.sigma, c.constraint, c.level);
    r.values[0] = t[0];
    r.values[1] = t[1];
    store_average(r, layout, 2, res, 0);
    r.values[3] = t[2];
    store_average(r, layout, 4, res, 1);
}

void quantile_replicate(const ExperimentConfig& c, const StudyLayout& layout, RngStream& rs, ReplicationRecord& r) {
    RngStream data_rng = rs.child(0);
    const std::vector<double> x = sample(quantile_distribution(c), c.n, data_rng);
    const std::span<const double> xs(x);
    const QuantileBankResult bank_result = quantile_bank_estimates(xs, c.p);
    const EstimatorVector& t = bank_result.estimates;
    const double q_np = t[t.size() - 1];
    for (std::size_t i = 0; i < bank_result.methods.size(); ++i) {
        r.values[static_cast<std::size_t>(bank_result.methods[i])] = t[i];
    }
    const Eigen::VectorXd center = c.quantile_center == "np"
                                       ? Eigen::VectorXd::Constant(t.values().size(), q_np)
                                       : t.values();
    const MseEstimate est =
        nonparametric_bootstrap_mse(xs, quantile_bank(bank_result.methods, c.p), center, c.boot, rs.child(1));
    r.boot_dropped = est.dropped;
    store_average(r, layout, 4, average(t, est.sigma, c.constraint), 0);
}

void synthetic_replicate(const ExperimentConfig& c, const StudyLayout& layout, RngStream& rs, ReplicationRecord& r) {
    // Recomputed per replicate so the study stays a pure function of (config, index).
    const Eigen::MatrixXd sigma = synthetic_sigma(c);
    const Eigen::MatrixXd root = spd_sqrt(sigma);
    const GroupStructure group(c.sizes);
    const auto k = sigma.rows();
    const auto d = static_cast<Eigen::Index>(group.parameters());

    RngStream noise = rs.child(0);
    auto draw_error = [&] {
        Eigen::VectorXd z(k);
        for (Eigen::Index i = 0; i < k; ++i) z(i) = noise.normal();
        return Eigen::VectorXd(root * z);
    };
    const Eigen::VectorXd error = draw_error();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t b = 0; b < c.boot; ++b) {
        const Eigen::VectorXd e = draw_error();
        gram.noalias() += e * e.transpose();
    }
    const MseMatrix sigma_hat(gram / static_cast<double>(c.boot));
    const MseMatrix sigma_true(sigma);
    const EstimatorVector t(error, group);

    const AveragingResult av = average(t, sigma_hat, c.constraint, c.level);
    const AveragingResult oracle = average(t, sigma_true, c.constraint, c.level);
    for (Eigen::Index j = 0; j < d; ++j) {
        store_average(r, layout, static_cast<std::size_t>(j), av, j);
        store_average(r, layout, static_cast<std::size_t>(d + j), oracle, j);
    }
    const Eigen::VectorXd s = sigma.llt().matrixL().solve(error);
    r.extras[0] = (av.theta_hat - oracle.theta_hat).squaredNorm();
    r.extras[1] = theorem1_bound(divergence_upper_bound(sigma_hat, sigma_true), s.squaredNorm(),
                                 risk_trace(oracle.weights, sigma_true));
}

}  // namespace

StudyLayout study_layout(const ExperimentConfig& c) {
    StudyLayout l;
    auto add = [&l](std::string name, double truth, bool interval) {
        l.names.push_back(std::move(name));
        l.truths.push_back(truth);
        l.has_interval.push_back(interval);
    };
    switch (c.study) {
        case Study::Location:
            add("mean", 0.0, false);
            add("median", 0.0, false);
            add("av", 0.0, true);
            if (c.avb) add("avb", 0.0, true);
            break;
        case Study::Weibull:
            add("beta_ml", c.beta, false);
            add("beta_mm", c.beta, false);
            add("beta_ols", c.beta, false);
            add("beta_av", c.beta, true);
            add("eta_ml", c.eta, false);
            add("eta_av", c.eta, true);
            break;
        case Study::Boolean:
            add("rho1", c.rho, false);
            add("rho2", c.rho, false);
            add("rho_av", c.rho, true);
            add("alpha1", c.alpha, false);
            add("alpha_av", c.alpha, true);
            l.extras = {"a_obs", "p_obs"};
            break;
        case Study::Quantile: {
            const double truth = quantile(quantile_distribution(c), c.p);
            for (QuantileMethod m : all_quantile_methods()) add(std::string(to_string(m)), truth, false);
            add("q_av", truth, false);
            break;
        }
        case Study::Synthetic:
            for (std::size_t j = 0; j < c.sizes.size(); ++j) add("av_" + std::to_string(j + 1), 0.0, true);
            for (std::size_t j = 0; j < c.sizes.size(); ++j) add("oracle_" + std::to_string(j + 1), 0.0, true);
            l.extras = {"loss_gap", "loss_bound"};
            break;
    }
    return l;
}

ReplicationRecord run_replicate(const ExperimentConfig& config, const StudyLayout& layout, std::size_t index) {
    ReplicationRecord r = blank_record(layout, index);
    RngStream rs = RngStream(config.seed).child(index);
    try {
        switch (config.study) {
            case Study::Location: location_replicate(config, layout, rs, r); break;
            case Study::Weibull: weibull_replicate(config, layout, rs, r); break;
            case Study::Boolean: boolean_replicate(config, layout, rs, r); break;
            case Study::Quantile: quantile_replicate(config, layout, rs, r); break;
            case Study::Synthetic: synthetic_replicate(config, layout, rs, r); break;
        }
    } catch (const FitError& e) {
        r = blank_record(layout, index);
        r.failed = true;
        r.failure = e.what();
    } catch (const DomainError& e) {
        r = blank_record(layout, index);
        r.failed = true;
        r.failure = e.what();
    } catch (const NumericError& e) {
        r = blank_record(layout, index);
        r.failed = true;
        r.failure = e.what();
    }
    if (r.failed) spdlog::debug("replicate {} failed: {}", index, r.failure);
    return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    ExperimentResult result;
    result.layout = study_layout(config);
    result.records.resize(config.reps);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.reps) return;
            try {
                result.records[i] = run_replicate(config, result.layout, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(config.reps);
                return;
            }
        }
    };
    const std::size_t n_threads = std::min(config.threads, config.reps);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::size_t failures = 0;
    for (const ReplicationRecord& r : result.records) failures += r.failed ? 1 : 0;
    if (failures > 0) spdlog::warn("{} of {} replications failed", failures, config.reps);
    if (2 * failures > config.reps) {
        throw ExcessFailures(std::to_string(failures) + " of " + std::to_string(config.reps) +
                             " replications failed (limit 50%)");
    }
    result.summary = mse_summary(result.records, result.layout);
    return result;
}

std::vector<std::optional<double>> coverage_summary(const std::vector<ReplicationRecord>& records,
                                                    const StudyLayout& layout) {
    std::vector<std::optional<double>> out(layout.names.size());
    for (std::size_t i = 0; i < layout.names.size(); ++i) {
        std::size_t formed = 0;
        std::size_t hit = 0;
        for (const ReplicationRecord& r : records) {
            if (r.failed || r.hits[i] < 0) continue;
            ++formed;
            hit += static_cast<std::size_t>(r.hits[i]);
        }
        if (formed > 0) out[i] = 100.0 * static_cast<double>(hit) / static_cast<double>(formed);
    }
    return out;
}

SummaryTable mse_summary(const std::vector<ReplicationRecord>& records, const StudyLayout& layout) {
    SummaryTable table;
    const auto coverage = coverage_summary(records, layout);
    for (std::size_t i = 0; i < layout.names.size(); ++i) {
        SummaryRow row;
        row.estimator = layout.names[i];
        row.coverage = coverage[i];
        std::vector<double> sq;
        for (const ReplicationRecord& r : records) {
            if (r.failed || !std::isfinite(r.values[i])) continue;
            const double e = r.values[i] - layout.truths[i];
            sq.push_back(e * e);
        }
        row.successes = sq.size();
        row.dropped = records.size() - sq.size();
        if (!sq.empty()) {
            double mean = 0.0;
            for (double v : sq) mean += v;
            mean /= static_cast<double>(sq.size());
            row.mse = mean;
            if (sq.size() >= 2) {
                double ss = 0.0;
                for (double v : sq) ss += (v - mean) * (v - mean);
                row.mse_se = std::sqrt(ss / static_cast<double>(sq.size() - 1) / static_cast<double>(sq.size()));
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace estavg::harness
