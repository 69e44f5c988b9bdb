#include "estavg/core/averaging.hpp"

#include "estavg/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace estavg {

Eigen::VectorXd combine(const EstimatorVector& t, const WeightMatrix& weights) {
    if (!(t.group() == weights.group())) {
        throw DomainError("estimators and weights have different group structures");
    }
    return weights.matrix().transpose() * t.values();
}

double risk_trace(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& sigma) {
    return (weights.transpose() * sigma * weights).trace();
}

double risk_trace(const WeightMatrix& weights, const MseMatrix& sigma) {
    return risk_trace(weights.matrix(), sigma.matrix());
}

double component_risk(const WeightMatrix& weights, const MseMatrix& sigma, Eigen::Index j) {
    const auto col = weights.matrix().col(j);
    return col.dot(sigma.matrix() * col);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal quantile needs p in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<ConfidenceInterval> confidence_intervals(const Eigen::VectorXd& theta_hat,
                                                     const Eigen::VectorXd& component_risks,
                                                     double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1)");
    }
    if (theta_hat.size() != component_risks.size()) {
        throw DomainError("one risk per parameter is required");
    }
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    std::vector<ConfidenceInterval> out;
    out.reserve(static_cast<std::size_t>(theta_hat.size()));
    for (Eigen::Index j = 0; j < theta_hat.size(); ++j) {
        if (!(component_risks(j) > 0.0)) {
            throw DomainError("confidence interval needs a positive component risk");
        }
        const double half = z * std::sqrt(component_risks(j));
        out.push_back({theta_hat(j) - half, theta_hat(j) + half, level});
    }
    return out;
}

AveragingResult average(const EstimatorVector& t, const MseMatrix& sigma, ConstraintSet constraint,
                        std::optional<double> level) {
    WeightMatrix weights = solve_weights(constraint, sigma, t.group());
    Eigen::VectorXd theta = combine(t, weights);
    Eigen::VectorXd risks(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        risks(j) = component_risk(weights, sigma, j);
    }
    std::vector<ConfidenceInterval> intervals;
    if (level) {
        intervals = confidence_intervals(theta, risks, *level);
    }
    return {std::move(theta), std::move(weights), std::move(risks), std::move(intervals)};
}

}  // namespace estavg
