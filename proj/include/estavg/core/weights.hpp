#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/core/mse_matrix.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>

namespace estavg {

/// Constraint sets for the k x d weight matrix, all inside {lambda : lambda^T J = I}.
enum class ConstraintSet {
    Maximal,        ///< only lambda^T J = I
    ComponentWise,  ///< column j supported on group j
    Convex,         ///< nonnegative entries (implies component-wise support)
    Selection,      ///< each column a canonical vector inside its group
};

[[nodiscard]] std::string_view to_string(ConstraintSet c) noexcept;
[[nodiscard]] std::optional<ConstraintSet> parse_constraint(std::string_view name) noexcept;

/// A k x d weight matrix satisfying lambda^T J = I to within kTolerance.
class WeightMatrix {
public:
    static constexpr double kTolerance = 1e-10;

    /// Validates the affine constraint; throws DomainError on violation.
    WeightMatrix(Eigen::MatrixXd entries, GroupStructure group);

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    [[nodiscard]] const GroupStructure& group() const noexcept { return group_; }
    [[nodiscard]] Eigen::VectorXd column(Eigen::Index j) const { return entries_.col(j); }
    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

    /// max |lambda^T J - I| entrywise.
    [[nodiscard]] static double constraint_residual(const Eigen::MatrixXd& entries,
                                                    const GroupStructure& group);

    /// Shifts each (column, group) block uniformly so its sum hits the target
    /// exactly: the Frobenius projection onto lambda^T J = I.
    [[nodiscard]] static Eigen::MatrixXd project_affine(Eigen::MatrixXd entries,
                                                        const GroupStructure& group);

private:
    Eigen::MatrixXd entries_;
    GroupStructure group_;
};

/// lambda* = S^-1 J (J^T S^-1 J)^-1, the minimizer of tr(lambda^T S lambda) over Lambda_max.
[[nodiscard]] WeightMatrix solve_weights_maximal(const MseMatrix& sigma, const GroupStructure& group);

/// Per group: S_j^-1 1 / (1^T S_j^-1 1) on the diagonal block, zeros elsewhere.
[[nodiscard]] WeightMatrix solve_weights_componentwise(const MseMatrix& sigma, const GroupStructure& group);

/// Nonnegative weights per group. Groups of size <= kConvexEnumerationLimit
/// are solved by enumerating supports; larger groups use projected gradient
/// followed by an exact solve on the detected support.
[[nodiscard]] WeightMatrix solve_weights_convex(const MseMatrix& sigma, const GroupStructure& group);

/// Per group: the estimator with smallest diagonal MSE (lowest index on ties).
[[nodiscard]] WeightMatrix solve_weights_selection(const MseMatrix& sigma, const GroupStructure& group);

[[nodiscard]] WeightMatrix solve_weights(ConstraintSet constraint, const MseMatrix& sigma,
                                         const GroupStructure& group);

inline constexpr std::size_t kConvexEnumerationLimit = 12;

namespace detail {

/// Simplex-constrained minimizer of w^T S w by support enumeration. Exposed
/// so the fallback can be checked against it.
[[nodiscard]] Eigen::VectorXd simplex_weights_enumerate(const Eigen::MatrixXd& block);
/// Projected-gradient minimizer on the simplex with support polishing.
[[nodiscard]] Eigen::VectorXd simplex_weights_iterative(const Eigen::MatrixXd& block);
/// Euclidean projection onto the probability simplex.
[[nodiscard]] Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

}  // namespace detail

}  // namespace estavg
