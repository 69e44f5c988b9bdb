#pragma once

#include <Eigen/Dense>

namespace estavg {

/// Symmetric positive-definite estimate of E[(T - J theta)(T - J theta)^T].
///
/// Construction symmetrizes the input and repairs it to SPD: when the
/// smallest eigenvalue falls below 1e-10 * trace / k the diagonal is lifted
/// to exactly that floor. A zero matrix (trace 0) is lifted to 1e-10 * I.
/// Throws NumericError for non-finite input or a condition number above
/// 1e12 after repair.
class MseMatrix {
public:
    static constexpr double kRelativeFloor = 1e-10;
    static constexpr double kMaxCondition = 1e12;

    explicit MseMatrix(const Eigen::MatrixXd& entries);

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return entries_.rows(); }
    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    /// Ridge added during repair (0 if none was needed).
    [[nodiscard]] double ridge() const noexcept { return ridge_; }
    [[nodiscard]] double condition_number() const noexcept { return condition_; }

    /// Principal submatrix on the given rows/columns.
    [[nodiscard]] Eigen::MatrixXd principal(Eigen::Index start, Eigen::Index count) const {
        return entries_.block(start, start, count, count);
    }

private:
    Eigen::MatrixXd entries_;
    double ridge_ = 0.0;
    double condition_ = 1.0;
};

}  // namespace estavg
