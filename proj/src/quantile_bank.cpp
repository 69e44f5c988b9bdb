#include "estavg/quantile_bank.hpp"

#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"
#include "estavg/weibull_bank.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace estavg {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::vector<double> positive_logs(std::span<const double> data, const char* what) {
    if (data.size() < 3) throw FitError(std::string(what) + " fit needs at least three observations");
    std::vector<double> logs;
    logs.reserve(data.size());
    for (double x : data) {
        if (!(x > 0.0) || !std::isfinite(x)) throw FitError(std::string(what) + " fit needs positive finite data");
        logs.push_back(std::log(x));
    }
    return logs;
}

// Profile log-likelihood of Burr XII in t = log c (constants dropped) with its
// first two derivatives in t.
struct BurrProfile {
    double value = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
    double k = 0.0;
};

BurrProfile burr_profile(const std::vector<double>& logs, double sum_log, double t) {
    const double c = std::exp(t);
    const auto n = static_cast<double>(logs.size());
    double s = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (double l : logs) {
        const double z = c * l;
        const double e = std::exp(-std::abs(z));
        const double sig = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
        s += std::max(z, 0.0) + std::log1p(e);
        s1 += l * sig;
        s2 += l * l * sig * (1.0 - sig);
    }
    BurrProfile p;
    p.k = n / s;
    p.value = n * std::log(c) - n * std::log(s) + (c - 1.0) * sum_log - s;
    const double d1 = n / c - n * s1 / s + sum_log - s1;
    const double d2 = -n / (c * c) - n * (s2 * s - s1 * s1) / (s * s) - s2;
    p.slope = c * d1;
    p.curvature = c * d1 + c * c * d2;
    return p;
}

}  // namespace

double quantile_np(std::span<const double> data, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    const double pos = std::floor(static_cast<double>(data.size()) * p + 1e-9);
    if (pos < 1.0 || pos > static_cast<double>(data.size())) {
        throw DomainError("order statistic index floor(n p) outside [1, n]");
    }
    std::vector<double> v(data.begin(), data.end());
    const auto idx = static_cast<std::ptrdiff_t>(pos) - 1;
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[static_cast<std::size_t>(idx)];
}

GammaFit gamma_ml(std::span<const double> data) {
    const std::vector<double> logs = positive_logs(data, "Gamma");
    const auto n = static_cast<double>(data.size());
    const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
    const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
    const double s = std::log(mean) - mean_log;
    if (!(s > 1e-14)) throw FitError("Gamma fit needs a non-degenerate sample");

    double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int it = 0; it < 100; ++it) {
        const double f = std::log(a) - boost::math::digamma(a) - s;
        const double df = 1.0 / a - boost::math::trigamma(a);
        double next = a - f / df;
        if (!(next > 0.0)) next = 0.5 * a;
        const bool done = std::abs(next - a) <= 1e-13 * a;
        a = next;
        if (done) {
            if (!std::isfinite(a)) break;
            return {a, mean / a};
        }
    }
    throw FitError("Gamma ML: Newton iteration did not converge");
}

double burr_log_likelihood(std::span<const double> data, double c, double k) {
    if (!(c > 0.0) || !(k > 0.0)) throw DomainError("Burr parameters must be positive");
    const auto n = static_cast<double>(data.size());
    double acc = n * (std::log(c) + std::log(k));
    for (double x : data) {
        if (!(x > 0.0)) throw DomainError("Burr likelihood needs positive data");
        const double l = std::log(x);
        acc += (c - 1.0) * l - (k + 1.0) * softplus(c * l);
    }
    return acc;
}

BurrFit burr_ml(std::span<const double> data) {
    const std::vector<double> logs = positive_logs(data, "Burr");
    if (*std::min_element(logs.begin(), logs.end()) == *std::max_element(logs.begin(), logs.end())) {
        throw FitError("Burr fit needs non-constant data");
    }
    const double sum_log = std::accumulate(logs.begin(), logs.end(), 0.0);
    const auto n = static_cast<double>(logs.size());
    const double t_lo = std::log(kBurrShapeLower);
    const double t_hi = std::log(kBurrShapeUpper);

    double best_value = -std::numeric_limits<double>::infinity();
    BurrFit best;
    for (double start : std::array{0.5, 2.0, 5.0}) {
        double t = std::log(start);
        BurrProfile cur = burr_profile(logs, sum_log, t);
        bool converged = false;
        for (int it = 0; it < 200 && !converged; ++it) {
            const bool pinned = (t <= t_lo && cur.slope < 0.0) || (t >= t_hi && cur.slope > 0.0);
            if (std::abs(cur.slope) <= 1e-8 * n || pinned) {
                converged = true;
                break;
            }
            double step = cur.curvature < 0.0 ? -cur.slope / cur.curvature : std::copysign(0.5, cur.slope);
            step = std::clamp(step, -1.0, 1.0);
            bool moved = false;
            for (int halving = 0; halving < 40; ++halving) {
                const double trial_t = std::clamp(t + step, t_lo, t_hi);
                const BurrProfile trial = burr_profile(logs, sum_log, trial_t);
                // Near the optimum the gain drops below the rounding error in the
                // value, so short concave steps are judged by the slope instead.
                const bool ascent = trial.value >= cur.value ||
                                    (cur.curvature < 0.0 && std::abs(step) <= 0.05 &&
                                     std::abs(trial.slope) < std::abs(cur.slope));
                if (std::isfinite(trial.value) && ascent) {
                    moved = trial_t != t;
                    t = trial_t;
                    cur = trial;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                // No ascent left at double precision: accept if the slope is small.
                converged = std::abs(cur.slope) <= 1e-5 * n;
                break;
            }
        }
        if (converged && cur.value > best_value) {
            best_value = cur.value;
            best = {std::exp(t), cur.k};
        }
    }
    if (!std::isfinite(best_value)) throw FitError("Burr ML: no start converged");
    return best;
}

std::string_view to_string(QuantileMethod method) {
    switch (method) {
        case QuantileMethod::Weibull: return "q_w";
        case QuantileMethod::Gamma: return "q_g";
        case QuantileMethod::Burr: return "q_b";
        case QuantileMethod::Nonparametric: return "q_np";
    }
    return "?";
}

std::vector<QuantileMethod> all_quantile_methods() {
    return {QuantileMethod::Weibull, QuantileMethod::Gamma, QuantileMethod::Burr, QuantileMethod::Nonparametric};
}

double quantile_estimate(QuantileMethod method, std::span<const double> data, double p) {
    switch (method) {
        case QuantileMethod::Weibull: {
            const WeibullFit f = weibull_ml(data);
            return quantile(Weibull{f.shape, f.scale}, p);
        }
        case QuantileMethod::Gamma: {
            const GammaFit f = gamma_ml(data);
            return quantile(Gamma{f.shape, f.scale}, p);
        }
        case QuantileMethod::Burr: {
            const BurrFit f = burr_ml(data);
            return quantile(BurrXII{f.c, f.k}, p);
        }
        case QuantileMethod::Nonparametric: return quantile_np(data, p);
    }
    throw DomainError("unknown quantile method");
}

EstimatorBank<std::span<const double>> quantile_bank(std::vector<QuantileMethod> methods, double p) {
    if (methods.empty()) throw DomainError("quantile bank needs at least one method");
    GroupStructure group{methods.size()};
    return {std::move(group), [methods = std::move(methods), p](const std::span<const double>& data) {
                Eigen::VectorXd t(static_cast<Eigen::Index>(methods.size()));
                for (std::size_t i = 0; i < methods.size(); ++i) {
                    const double q = quantile_estimate(methods[i], data, p);
                    if (!std::isfinite(q)) throw FitError("nonfinite quantile estimate");
                    t(static_cast<Eigen::Index>(i)) = q;
                }
                return t;
            }};
}

QuantileBankResult quantile_bank_estimates(std::span<const double> data, double p) {
    std::vector<QuantileMethod> kept;
    std::vector<double> values;
    for (QuantileMethod m : all_quantile_methods()) {
        try {
            const double q = quantile_estimate(m, data, p);
            if (!std::isfinite(q)) throw FitError("nonfinite quantile estimate");
            kept.push_back(m);
            values.push_back(q);
        } catch (const FitError& e) {
            if (m == QuantileMethod::Nonparametric) throw;
            spdlog::debug("quantile bank: dropping {} ({})", to_string(m), e.what());
        }
    }
    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return {EstimatorVector(std::move(t), GroupStructure{kept.size()}), std::move(kept)};
}

}  // namespace estavg
