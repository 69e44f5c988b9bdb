#include "estavg/core/mse_matrix.hpp"

#include "estavg/errors.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace estavg {

MseMatrix::MseMatrix(const Eigen::MatrixXd& entries) {
    if (entries.rows() == 0 || entries.rows() != entries.cols()) {
        throw DomainError("MSE matrix must be square and non-empty");
    }
    if (!entries.allFinite()) {
        throw NumericError("MSE matrix has non-finite entries");
    }
    entries_ = 0.5 * (entries + entries.transpose());

    const auto k = static_cast<double>(entries_.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NumericError("eigenvalue decomposition of MSE matrix failed");
    }
    const double trace = entries_.trace();
    const double floor = trace > 0.0 ? kRelativeFloor * trace / k : kRelativeFloor;
    double lo = eig.eigenvalues().minCoeff();
    double hi = eig.eigenvalues().maxCoeff();
    if (lo < floor) {
        ridge_ = floor - lo;
        entries_.diagonal().array() += ridge_;
        lo += ridge_;
        hi += ridge_;
    }
    condition_ = hi / lo;
    if (!(condition_ <= kMaxCondition)) {
        throw NumericError("MSE matrix condition number " + std::to_string(condition_) +
                           " exceeds limit after repair");
    }
}

}  // namespace estavg
