#include "estavg/core/diagnostics.hpp"

#include "estavg/core/averaging.hpp"
#include "estavg/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace estavg {

double divergence_upper_bound(const MseMatrix& a, const MseMatrix& b) {
    if (a.size() != b.size()) {
        throw DomainError("divergence needs matrices of equal order");
    }
    Eigen::LLT<Eigen::MatrixXd> la(a.matrix());
    Eigen::LLT<Eigen::MatrixXd> lb(b.matrix());
    if (la.info() != Eigen::Success || lb.info() != Eigen::Success) {
        throw NumericError("divergence bound needs positive definite inputs");
    }
    // A B^-1 = (B^-1 A)^T for symmetric A, B.
    const Eigen::MatrixXd ab = lb.solve(a.matrix()).transpose();
    const Eigen::MatrixXd ba = la.solve(b.matrix()).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ab - ba);
    return svd.singularValues()(0);
}

double divergence_at(const Eigen::MatrixXd& weights, const MseMatrix& a, const MseMatrix& b) {
    const double ta = risk_trace(weights, a.matrix());
    const double tb = risk_trace(weights, b.matrix());
    return std::max(std::abs(1.0 - ta / tb), std::abs(1.0 - tb / ta));
}

double divergence_sampled(const MseMatrix& a, const MseMatrix& b, ConstraintSet constraint,
                          const GroupStructure& group, std::size_t n_samples, RngStream& rng) {
    double worst = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        worst = std::max(worst, divergence_at(random_feasible_weights(constraint, group, rng), a, b));
    }
    return worst;
}

double theorem1_bound(double delta, double s_norm_sq, double oracle_risk) {
    if (delta < 0.0 || s_norm_sq < 0.0 || oracle_risk < 0.0) {
        throw DomainError("theorem bound inputs must be nonnegative");
    }
    return (2.0 * delta + delta * delta) * s_norm_sq * oracle_risk;
}

Eigen::MatrixXd random_feasible_weights(ConstraintSet constraint, const GroupStructure& group, RngStream& rng,
                                        double scale) {
    const auto k = static_cast<Eigen::Index>(group.estimators());
    const auto d = static_cast<Eigen::Index>(group.parameters());
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(k, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto own = static_cast<std::size_t>(j);
        const auto start = static_cast<Eigen::Index>(group.offset(own));
        const auto len = static_cast<Eigen::Index>(group.size(own));
        switch (constraint) {
            case ConstraintSet::Maximal:
                for (Eigen::Index i = 0; i < k; ++i) lambda(i, j) = scale * rng.normal();
                break;
            case ConstraintSet::ComponentWise:
                for (Eigen::Index i = 0; i < len; ++i) lambda(start + i, j) = scale * rng.normal();
                break;
            case ConstraintSet::Convex: {
                double total = 0.0;
                for (Eigen::Index i = 0; i < len; ++i) {
                    lambda(start + i, j) = rng.exponential();
                    total += lambda(start + i, j);
                }
                lambda.col(j).segment(start, len) /= total;
                break;
            }
            case ConstraintSet::Selection:
                lambda(start + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(len))), j) = 1.0;
                break;
        }
    }
    if (constraint == ConstraintSet::Maximal || constraint == ConstraintSet::ComponentWise) {
        lambda = WeightMatrix::project_affine(std::move(lambda), group);
    }
    return lambda;
}

Eigen::MatrixXd random_spd(Eigen::Index k, RngStream& rng, double ridge) {
    Eigen::MatrixXd b(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) b(i, j) = rng.normal();
    Eigen::MatrixXd m = b * b.transpose() / static_cast<double>(k);
    m.diagonal().array() += ridge;
    return m;
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < 0.0) {
        throw NumericError("square root needs a positive semidefinite matrix");
    }
    return eig.operatorSqrt();
}

}  // namespace estavg
