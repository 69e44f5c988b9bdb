#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/core/mse_matrix.hpp"
#include "estavg/core/weights.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace estavg {

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double level = 0.0;

    [[nodiscard]] bool contains(double x) const noexcept { return low <= x && x <= high; }
};

/// Averaged estimate together with the weights and risks it came from.
struct AveragingResult {
    Eigen::VectorXd theta_hat;
    WeightMatrix weights;
    /// alpha_j = lambda_j^T S lambda_j per parameter.
    Eigen::VectorXd component_risks;
    std::vector<ConfidenceInterval> intervals;
};

/// theta = lambda^T T.
[[nodiscard]] Eigen::VectorXd combine(const EstimatorVector& t, const WeightMatrix& weights);

/// tr(lambda^T S lambda): the quadratic risk of lambda^T T when S is the MSE matrix.
[[nodiscard]] double risk_trace(const WeightMatrix& weights, const MseMatrix& sigma);
[[nodiscard]] double risk_trace(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& sigma);

/// lambda_j^T S lambda_j for column j.
[[nodiscard]] double component_risk(const WeightMatrix& weights, const MseMatrix& sigma, Eigen::Index j);

/// Standard-normal quantile.
[[nodiscard]] double normal_quantile(double p);

/// theta_j +/- z_{(1+level)/2} sqrt(alpha_j). Throws DomainError when an
/// alpha_j is not positive or level is outside (0, 1).
[[nodiscard]] std::vector<ConfidenceInterval> confidence_intervals(const Eigen::VectorXd& theta_hat,
                                                                   const Eigen::VectorXd& component_risks,
                                                                   double level);

/// Full pipeline: solve weights on `sigma`, combine, compute risks, and
/// optionally intervals at `level`.
[[nodiscard]] AveragingResult average(const EstimatorVector& t, const MseMatrix& sigma,
                                      ConstraintSet constraint,
                                      std::optional<double> level = std::nullopt);

}  // namespace estavg
