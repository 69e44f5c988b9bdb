#include "estavg/distributions.hpp"

#include "estavg/errors.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace estavg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_inv(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mixture_quantile(const GaussianMixture& m, double p) {
    // Monotone cdf: bisection to machine precision.
    double lo = -m.separation - 40.0;
    double hi = m.separation + 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double c = 0.5 * (normal_cdf(mid + m.separation) + normal_cdf(mid - m.separation));
        (c < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void validate(const Distribution& dist) {
    std::visit(overloaded{
                   [](const Gaussian& d) { require(d.sd > 0.0, "Gaussian sd must be positive"); },
                   [](const Cauchy& d) { require(d.scale > 0.0, "Cauchy scale must be positive"); },
                   [](const Student& d) { require(d.nu > 0.0, "Student degrees of freedom must be positive"); },
                   [](const Logistic& d) { require(d.scale > 0.0, "logistic scale must be positive"); },
                   [](const GaussianMixture& d) { require(d.separation >= 0.0, "mixture separation must be >= 0"); },
                   [](const Weibull& d) { require(d.shape > 0.0 && d.scale > 0.0, "Weibull parameters must be positive"); },
                   [](const Gamma& d) { require(d.shape > 0.0 && d.scale > 0.0, "Gamma parameters must be positive"); },
                   [](const BurrXII& d) { require(d.c > 0.0 && d.k > 0.0, "Burr parameters must be positive"); },
                   [](const Lognormal& d) { require(d.sigma > 0.0, "lognormal sigma must be positive"); },
                   [](const BetaScaled& d) { require(d.alpha > 0.0, "beta alpha must be positive"); },
               },
               dist);
}

double pdf(const Distribution& dist, double x) {
    validate(dist);
    return std::visit(
        overloaded{
            [x](const Gaussian& d) { return normal_pdf((x - d.mean) / d.sd) / d.sd; },
            [x](const Cauchy& d) {
                const double z = (x - d.location) / d.scale;
                return 1.0 / (kPi * d.scale * (1.0 + z * z));
            },
            [x](const Student& d) { return boost::math::pdf(boost::math::students_t_distribution<double>(d.nu), x); },
            [x](const Logistic& d) {
                const double e = std::exp(-std::abs(x - d.location) / d.scale);
                return e / (d.scale * (1.0 + e) * (1.0 + e));
            },
            [x](const GaussianMixture& d) {
                return 0.5 * (normal_pdf(x + d.separation) + normal_pdf(x - d.separation));
            },
            [x](const Weibull& d) {
                if (x < 0.0) return 0.0;
                const double z = x / d.scale;
                return d.shape / d.scale * std::pow(z, d.shape - 1.0) * std::exp(-std::pow(z, d.shape));
            },
            [x](const Gamma& d) {
                if (x < 0.0) return 0.0;
                return boost::math::pdf(boost::math::gamma_distribution<double>(d.shape, d.scale), x);
            },
            [x](const BurrXII& d) {
                if (x <= 0.0) return 0.0;
                const double xc = std::pow(x, d.c);
                return d.c * d.k * xc / x * std::pow(1.0 + xc, -d.k - 1.0);
            },
            [x](const Lognormal& d) {
                if (x <= 0.0) return 0.0;
                return normal_pdf((std::log(x) - d.mu) / d.sigma) / (x * d.sigma);
            },
            [x](const BetaScaled& d) {
                if (x < 0.0 || x > BetaScaled::kUpper) return 0.0;
                return 10.0 * d.alpha * std::pow(1.0 - 10.0 * x, d.alpha - 1.0);
            },
        },
        dist);
}

double cdf(const Distribution& dist, double x) {
    validate(dist);
    return std::visit(
        overloaded{
            [x](const Gaussian& d) { return normal_cdf((x - d.mean) / d.sd); },
            [x](const Cauchy& d) { return 0.5 + std::atan((x - d.location) / d.scale) / kPi; },
            [x](const Student& d) { return boost::math::cdf(boost::math::students_t_distribution<double>(d.nu), x); },
            [x](const Logistic& d) { return 1.0 / (1.0 + std::exp(-(x - d.location) / d.scale)); },
            [x](const GaussianMixture& d) {
                return 0.5 * (normal_cdf(x + d.separation) + normal_cdf(x - d.separation));
            },
            [x](const Weibull& d) { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / d.scale, d.shape)); },
            [x](const Gamma& d) {
                return x <= 0.0 ? 0.0 : boost::math::cdf(boost::math::gamma_distribution<double>(d.shape, d.scale), x);
            },
            [x](const BurrXII& d) {
                return x <= 0.0 ? 0.0 : -std::expm1(-d.k * std::log1p(std::pow(x, d.c)));
            },
            [x](const Lognormal& d) { return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - d.mu) / d.sigma); },
            [x](const BetaScaled& d) {
                if (x <= 0.0) return 0.0;
                if (x >= BetaScaled::kUpper) return 1.0;
                return 1.0 - std::pow(1.0 - 10.0 * x, d.alpha);
            },
        },
        dist);
}

double quantile(const Distribution& dist, double p) {
    validate(dist);
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    return std::visit(
        overloaded{
            [p](const Gaussian& d) { return d.mean + d.sd * normal_inv(p); },
            [p](const Cauchy& d) { return d.location + d.scale * std::tan(kPi * (p - 0.5)); },
            [p](const Student& d) {
                return boost::math::quantile(boost::math::students_t_distribution<double>(d.nu), p);
            },
            [p](const Logistic& d) { return d.location + d.scale * std::log(p / (1.0 - p)); },
            [p](const GaussianMixture& d) { return mixture_quantile(d, p); },
            [p](const Weibull& d) { return d.scale * std::pow(-std::log1p(-p), 1.0 / d.shape); },
            [p](const Gamma& d) {
                return boost::math::quantile(boost::math::gamma_distribution<double>(d.shape, d.scale), p);
            },
            [p](const BurrXII& d) { return std::pow(std::expm1(-std::log1p(-p) / d.k), 1.0 / d.c); },
            [p](const Lognormal& d) { return std::exp(d.mu + d.sigma * normal_inv(p)); },
            [p](const BetaScaled& d) { return BetaScaled::kUpper * (1.0 - std::pow(1.0 - p, 1.0 / d.alpha)); },
        },
        dist);
}

double draw_standard_gamma(double shape, RngStream& rng) {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a).
        return draw_standard_gamma(shape + 1.0, rng) * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double draw(const Distribution& dist, RngStream& rng) {
    return std::visit(
        overloaded{
            [&rng](const Gaussian& d) { return d.mean + d.sd * rng.normal(); },
            [&rng](const Cauchy& d) { return d.location + d.scale * std::tan(kPi * (rng.uniform() - 0.5)); },
            [&rng](const Student& d) {
                const double z = rng.normal();
                const double chi2 = 2.0 * draw_standard_gamma(0.5 * d.nu, rng);
                return z / std::sqrt(chi2 / d.nu);
            },
            [&rng](const Logistic& d) {
                const double u = rng.uniform();
                return d.location + d.scale * std::log(u / (1.0 - u));
            },
            [&rng](const GaussianMixture& d) {
                const double center = rng.uniform() < 0.5 ? -d.separation : d.separation;
                return center + rng.normal();
            },
            [&rng](const Weibull& d) { return d.scale * std::pow(rng.exponential(), 1.0 / d.shape); },
            [&rng](const Gamma& d) { return d.scale * draw_standard_gamma(d.shape, rng); },
            [&rng](const BurrXII& d) {
                // Inverse cdf with 1 - U ~ U.
                return std::pow(std::expm1(-std::log(rng.uniform()) / d.k), 1.0 / d.c);
            },
            [&rng](const Lognormal& d) { return std::exp(d.mu + d.sigma * rng.normal()); },
            [&rng](const BetaScaled& d) {
                return BetaScaled::kUpper * (1.0 - std::pow(rng.uniform(), 1.0 / d.alpha));
            },
        },
        dist);
}

std::vector<double> sample(const Distribution& dist, std::size_t n, RngStream& rng) {
    validate(dist);
    if (n == 0) {
        throw DomainError("sample size must be at least 1");
    }
    std::vector<double> out(n);
    for (double& x : out) x = draw(dist, rng);
    return out;
}

std::string describe(const Distribution& dist) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&os](const Gaussian& d) { os << "gaussian(" << d.mean << "," << d.sd << ")"; },
                   [&os](const Cauchy& d) { os << "cauchy(" << d.location << "," << d.scale << ")"; },
                   [&os](const Student& d) { os << "student(" << d.nu << ")"; },
                   [&os](const Logistic& d) { os << "logistic(" << d.location << "," << d.scale << ")"; },
                   [&os](const GaussianMixture& d) { os << "mixture(+-" << d.separation << ")"; },
                   [&os](const Weibull& d) { os << "weibull(" << d.shape << "," << d.scale << ")"; },
                   [&os](const Gamma& d) { os << "gamma(" << d.shape << "," << d.scale << ")"; },
                   [&os](const BurrXII& d) { os << "burr(" << d.c << "," << d.k << ")"; },
                   [&os](const Lognormal& d) { os << "lognormal(" << d.mu << "," << d.sigma << ")"; },
                   [&os](const BetaScaled& d) { os << "beta01(1," << d.alpha << ")"; },
               },
               dist);
    return os.str();
}

}  // namespace estavg
