#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/core/mse_matrix.hpp"
#include "estavg/core/weights.hpp"
#include "estavg/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace estavg {

/// Operator norm of A B^-1 - B A^-1. Dominates the divergence
/// sup_lambda max(|1 - tr(l'Al)/tr(l'Bl)|, |1 - tr(l'Bl)/tr(l'Al)|) over any
/// constraint set.
[[nodiscard]] double divergence_upper_bound(const MseMatrix& a, const MseMatrix& b);

/// Divergence of the two trace forms at one weight matrix.
[[nodiscard]] double divergence_at(const Eigen::MatrixXd& weights, const MseMatrix& a, const MseMatrix& b);

/// Largest divergence over `n_samples` random members of the constraint set;
/// a lower bound on the supremum.
[[nodiscard]] double divergence_sampled(const MseMatrix& a, const MseMatrix& b, ConstraintSet constraint,
                                        const GroupStructure& group, std::size_t n_samples, RngStream& rng);

/// (2 delta + delta^2) * |S|^2 * oracle_risk, the bound on the squared
/// distance between the averaged estimate and the oracle.
[[nodiscard]] double theorem1_bound(double delta, double s_norm_sq, double oracle_risk);

/// A random member of the constraint set.
///
/// Maximal: Gaussian entries shifted onto lambda^T J = I. ComponentWise: the
/// same restricted to each column's own group. Convex: a flat Dirichlet draw
/// on each own group. Selection: a uniformly chosen vertex per group.
[[nodiscard]] Eigen::MatrixXd random_feasible_weights(ConstraintSet constraint, const GroupStructure& group,
                                                      RngStream& rng, double scale = 1.0);

/// A random SPD matrix B B^T / k + eps I with Gaussian B (test and
/// synthetic-study helper).
[[nodiscard]] Eigen::MatrixXd random_spd(Eigen::Index k, RngStream& rng, double ridge = 0.05);

/// Symmetric square root of an SPD matrix.
[[nodiscard]] Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);

}  // namespace estavg
