#pragma once

#include "estavg/rng.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace estavg {

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
};
struct Cauchy {
    double location = 0.0;
    double scale = 1.0;
};
struct Student {
    double nu = 7.0;
};
struct Logistic {
    double location = 0.0;
    double scale = 1.0;
};
/// Equal mixture of N(-2, 1) and N(2, 1).
struct GaussianMixture {
    double separation = 2.0;
};
struct Weibull {
    double shape = 1.0;
    double scale = 1.0;
};
struct Gamma {
    double shape = 1.0;
    double scale = 1.0;
};
/// Burr type XII: F(x) = 1 - (1 + x^c)^-k, x > 0.
struct BurrXII {
    double c = 1.0;
    double k = 1.0;
};
struct Lognormal {
    double mu = 0.0;
    double sigma = 1.0;
};
/// Beta(1, alpha) rescaled to [0, 0.1]: density 10 alpha (1 - 10x)^(alpha - 1).
struct BetaScaled {
    double alpha = 1.0;
    static constexpr double kUpper = 0.1;
};

using Distribution =
    std::variant<Gaussian, Cauchy, Student, Logistic, GaussianMixture, Weibull, Gamma, BurrXII, Lognormal, BetaScaled>;

/// Throws DomainError when parameters are outside the family's domain.
void validate(const Distribution& dist);

[[nodiscard]] double pdf(const Distribution& dist, double x);
[[nodiscard]] double cdf(const Distribution& dist, double x);
/// Throws DomainError unless p lies in (0, 1).
[[nodiscard]] double quantile(const Distribution& dist, double p);

[[nodiscard]] double draw(const Distribution& dist, RngStream& rng);
/// n iid draws. Throws DomainError for n == 0 or invalid parameters.
[[nodiscard]] std::vector<double> sample(const Distribution& dist, std::size_t n, RngStream& rng);

[[nodiscard]] std::string describe(const Distribution& dist);

/// Gamma(shape, 1) variate (Marsaglia-Tsang).
[[nodiscard]] double draw_standard_gamma(double shape, RngStream& rng);

}  // namespace estavg
