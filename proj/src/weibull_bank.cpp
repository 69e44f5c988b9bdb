#include "estavg/weibull_bank.hpp"

#include "estavg/distributions.hpp"
#include "estavg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace estavg {

namespace {

struct LogSample {
    std::vector<double> logs;
    double max_log = 0.0;
    double mean_log = 0.0;
};

LogSample log_sample(std::span<const double> data) {
    if (data.size() < 2) throw FitError("Weibull fit needs at least two observations");
    LogSample s;
    s.logs.reserve(data.size());
    for (double x : data) {
        if (!(x > 0.0) || !std::isfinite(x)) throw FitError("Weibull fit needs positive finite data");
        s.logs.push_back(std::log(x));
    }
    s.max_log = *std::max_element(s.logs.begin(), s.logs.end());
    s.mean_log = std::accumulate(s.logs.begin(), s.logs.end(), 0.0) / static_cast<double>(s.logs.size());
    if (s.max_log == *std::min_element(s.logs.begin(), s.logs.end())) {
        throw FitError("Weibull fit needs non-constant data");
    }
    return s;
}

struct ScoreTerms {
    double score = 0.0;      // g(b)
    double slope = 0.0;      // g'(b)
    double log_mean_w = 0.0; // log mean exp(b (L - Lmax))
};

// Weighted moments with weights w_i = exp(b (L_i - Lmax)), overflow-free.
ScoreTerms score_terms(const LogSample& s, double shape) {
    double w_sum = 0.0;
    double wl = 0.0;
    double wll = 0.0;
    for (double l : s.logs) {
        const double d = l - s.max_log;
        const double w = std::exp(shape * d);
        w_sum += w;
        wl += w * d;
        wll += w * d * d;
    }
    const double mean_d = wl / w_sum;
    const double var_d = std::max(0.0, wll / w_sum - mean_d * mean_d);
    ScoreTerms t;
    t.score = 1.0 / shape + (s.mean_log - s.max_log) - mean_d;
    t.slope = -1.0 / (shape * shape) - var_d;
    t.log_mean_w = std::log(w_sum / static_cast<double>(s.logs.size()));
    return t;
}

// log Gamma(1 + 2/b) - 2 log Gamma(1 + 1/b): log of (1 + CV^2), decreasing in b.
double log_moment_ratio(double shape) {
    return std::lgamma(1.0 + 2.0 / shape) - 2.0 * std::lgamma(1.0 + 1.0 / shape);
}

}  // namespace

double weibull_ml_score(std::span<const double> data, double shape) {
    return score_terms(log_sample(data), shape).score;
}

WeibullFit weibull_ml(std::span<const double> data) {
    const LogSample s = log_sample(data);
    double lo = kWeibullShapeLower;
    double hi = kWeibullShapeUpper;
    if (!(score_terms(s, lo).score > 0.0) || !(score_terms(s, hi).score < 0.0)) {
        throw FitError("Weibull ML: shape root outside [1e-3, 1e3]");
    }

    // Start from the log-scale moment estimate: sd(log X) = pi / (b sqrt 6).
    double ss = 0.0;
    for (double l : s.logs) ss += (l - s.mean_log) * (l - s.mean_log);
    const double sd = std::sqrt(ss / static_cast<double>(s.logs.size() - 1));
    double shape = std::clamp(1.2825498301618641 / sd, 2.0 * lo, 0.5 * hi);

    ScoreTerms t = score_terms(s, shape);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(t.score) * shape <= 1e-10) {
            return {shape, std::exp(s.max_log + t.log_mean_w / shape)};
        }
        (t.score > 0.0 ? lo : hi) = shape;
        double next = shape - t.score / t.slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - shape) <= 1e-15 * shape) {
            shape = next;
            t = score_terms(s, shape);
            return {shape, std::exp(s.max_log + t.log_mean_w / shape)};
        }
        shape = next;
        t = score_terms(s, shape);
    }
    throw FitError("Weibull ML: Newton iteration did not converge");
}

WeibullFit weibull_mm(std::span<const double> data) {
    if (data.size() < 2) throw FitError("Weibull MM needs at least two observations");
    const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
    double ss = 0.0;
    for (double x : data) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(data.size() - 1);
    if (!(mean > 0.0) || !(var > 0.0)) throw FitError("Weibull MM needs positive mean and variance");

    const double target = std::log1p(var / (mean * mean));
    double lo = std::log(kWeibullShapeLower);
    double hi = std::log(kWeibullShapeUpper);
    if (!(log_moment_ratio(std::exp(hi)) <= target && target <= log_moment_ratio(std::exp(lo)))) {
        throw FitError("Weibull MM: coefficient of variation outside the achievable range");
    }
    while (std::exp(hi) - std::exp(lo) > 1e-12 * std::max(1.0, std::exp(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (log_moment_ratio(std::exp(mid)) > target ? lo : hi) = mid;
    }
    const double shape = std::exp(0.5 * (lo + hi));
    return {shape, mean * std::exp(-std::lgamma(1.0 + 1.0 / shape))};
}

double weibull_ols(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 2) throw FitError("Weibull OLS needs at least two observations");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    if (!(x.front() > 0.0)) throw FitError("Weibull OLS needs positive data");
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(x[i]);
        const double f = static_cast<double>(i + 1) / static_cast<double>(n + 1);
        y[i] = std::log(-std::log1p(-f));
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw FitError("Weibull OLS: zero regressor variance");
    return sxy / sxx;
}

EstimatorVector weibull_bank_estimates(std::span<const double> data) {
    const WeibullFit ml = weibull_ml(data);
    const WeibullFit mm = weibull_mm(data);
    const double ols = weibull_ols(data);
    Eigen::Vector4d t(ml.shape, mm.shape, ols, ml.scale);
    return EstimatorVector(t, GroupStructure{3, 1});
}

Eigen::Vector2d weibull_center(const EstimatorVector& t) {
    return {(t[0] + t[1] + t[2]) / 3.0, t[3]};
}

EstimatorBank<std::span<const double>> weibull_bank() {
    return {GroupStructure{3, 1}, [](const std::span<const double>& data) -> Eigen::VectorXd {
                return weibull_bank_estimates(data).values();
            }};
}

ModelSimulator<std::vector<double>> weibull_simulator() {
    return [](const Eigen::VectorXd& parameter, std::size_t n, RngStream& rng) {
        if (!(parameter(0) > 0.0) || !(parameter(1) > 0.0)) {
            throw FitError("Weibull simulator needs positive parameters");
        }
        return sample(Weibull{parameter(0), parameter(1)}, n, rng);
    };
}

}  // namespace estavg
