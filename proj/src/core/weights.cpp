#include "estavg/core/weights.hpp"

#include "estavg/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace estavg {

std::string_view to_string(ConstraintSet c) noexcept {
    switch (c) {
        case ConstraintSet::Maximal: return "maximal";
        case ConstraintSet::ComponentWise: return "componentwise";
        case ConstraintSet::Convex: return "convex";
        case ConstraintSet::Selection: return "selection";
    }
    return "maximal";
}

std::optional<ConstraintSet> parse_constraint(std::string_view name) noexcept {
    if (name == "maximal") return ConstraintSet::Maximal;
    if (name == "componentwise") return ConstraintSet::ComponentWise;
    if (name == "convex") return ConstraintSet::Convex;
    if (name == "selection") return ConstraintSet::Selection;
    return std::nullopt;
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd entries, GroupStructure group)
    : entries_(std::move(entries)), group_(std::move(group)) {
    if (static_cast<std::size_t>(entries_.rows()) != group_.estimators() ||
        static_cast<std::size_t>(entries_.cols()) != group_.parameters()) {
        throw DomainError("weight matrix shape does not match group structure");
    }
    if (!entries_.allFinite()) {
        throw NumericError("weight matrix has non-finite entries");
    }
    if (constraint_residual(entries_, group_) > kTolerance) {
        throw DomainError("weight matrix violates lambda^T J = I");
    }
}

double WeightMatrix::constraint_residual(const Eigen::MatrixXd& entries, const GroupStructure& group) {
    const Eigen::MatrixXd gram = entries.transpose() * build_selector(group);
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd WeightMatrix::project_affine(Eigen::MatrixXd entries, const GroupStructure& group) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
        for (std::size_t l = 0; l < group.parameters(); ++l) {
            const auto start = static_cast<Eigen::Index>(group.offset(l));
            const auto len = static_cast<Eigen::Index>(group.size(l));
            auto block = entries.col(j).segment(start, len);
            const double target = static_cast<Eigen::Index>(l) == j ? 1.0 : 0.0;
            block.array() -= (block.sum() - target) / static_cast<double>(len);
        }
    }
    return entries;
}

namespace {

// Weights S^-1 1 / 1^T S^-1 1 for one SPD block.
Eigen::VectorXd affine_block_weights(const Eigen::MatrixXd& block) {
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) {
        throw NumericError("diagonal block is not positive definite");
    }
    Eigen::VectorXd w = llt.solve(Eigen::VectorXd::Ones(block.rows()));
    const double total = w.sum();
    if (!(total > 0.0) || !w.allFinite()) {
        throw NumericError("degenerate diagonal block");
    }
    return w / total;
}

double quadratic(const Eigen::MatrixXd& s, const Eigen::VectorXd& w) { return w.dot(s * w); }

void check_shape(const MseMatrix& sigma, const GroupStructure& group) {
    if (static_cast<std::size_t>(sigma.size()) != group.estimators()) {
        throw DomainError("MSE matrix size does not match group structure");
    }
}

template <class BlockSolver>
WeightMatrix solve_per_group(const MseMatrix& sigma, const GroupStructure& group, BlockSolver&& solve_block) {
    check_shape(sigma, group);
    Eigen::MatrixXd lambda =
        Eigen::MatrixXd::Zero(sigma.size(), static_cast<Eigen::Index>(group.parameters()));
    for (std::size_t j = 0; j < group.parameters(); ++j) {
        const auto start = static_cast<Eigen::Index>(group.offset(j));
        const auto len = static_cast<Eigen::Index>(group.size(j));
        lambda.col(static_cast<Eigen::Index>(j)).segment(start, len) =
            solve_block(sigma.principal(start, len));
    }
    return WeightMatrix(WeightMatrix::project_affine(std::move(lambda), group), group);
}

}  // namespace

WeightMatrix solve_weights_maximal(const MseMatrix& sigma, const GroupStructure& group) {
    check_shape(sigma, group);
    const Eigen::MatrixXd selector = build_selector(group);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma.matrix());
    if (llt.info() != Eigen::Success) {
        throw NumericError("MSE matrix is not positive definite");
    }
    const Eigen::MatrixXd sinv_j = llt.solve(selector);  // S^-1 J
    const Eigen::MatrixXd gram = selector.transpose() * sinv_j;  // J^T S^-1 J
    Eigen::LLT<Eigen::MatrixXd> gram_llt(gram);
    if (gram_llt.info() != Eigen::Success) {
        throw NumericError("J^T S^-1 J is not positive definite");
    }
    Eigen::MatrixXd lambda = gram_llt.solve(sinv_j.transpose()).transpose();
    return WeightMatrix(WeightMatrix::project_affine(std::move(lambda), group), group);
}

WeightMatrix solve_weights_componentwise(const MseMatrix& sigma, const GroupStructure& group) {
    return solve_per_group(sigma, group, affine_block_weights);
}

WeightMatrix solve_weights_convex(const MseMatrix& sigma, const GroupStructure& group) {
    Eigen::MatrixXd lambda = solve_per_group(sigma, group, [](const Eigen::MatrixXd& block) {
        return static_cast<std::size_t>(block.rows()) <= kConvexEnumerationLimit
                   ? detail::simplex_weights_enumerate(block)
                   : detail::simplex_weights_iterative(block);
    }).matrix();
    // The affine projection can push an exact zero to -1e-17; clamp and renormalize.
    for (std::size_t j = 0; j < group.parameters(); ++j) {
        auto seg = lambda.col(static_cast<Eigen::Index>(j))
                       .segment(static_cast<Eigen::Index>(group.offset(j)),
                                static_cast<Eigen::Index>(group.size(j)));
        seg = seg.cwiseMax(0.0);
        seg /= seg.sum();
    }
    return WeightMatrix(std::move(lambda), group);
}

WeightMatrix solve_weights_selection(const MseMatrix& sigma, const GroupStructure& group) {
    return solve_per_group(sigma, group, [](const Eigen::MatrixXd& block) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < block.rows(); ++i) {
            if (block(i, i) < block(best, best)) {
                best = i;
            }
        }
        return Eigen::VectorXd(Eigen::VectorXd::Unit(block.rows(), best));
    });
}

WeightMatrix solve_weights(ConstraintSet constraint, const MseMatrix& sigma, const GroupStructure& group) {
    switch (constraint) {
        case ConstraintSet::Maximal: return solve_weights_maximal(sigma, group);
        case ConstraintSet::ComponentWise: return solve_weights_componentwise(sigma, group);
        case ConstraintSet::Convex: return solve_weights_convex(sigma, group);
        case ConstraintSet::Selection: return solve_weights_selection(sigma, group);
    }
    throw DomainError("unknown constraint set");
}

namespace detail {

Eigen::VectorXd simplex_weights_enumerate(const Eigen::MatrixXd& block) {
    const auto m = block.rows();
    if (m == 1) {
        return Eigen::VectorXd::Ones(1);
    }
    // Among supports whose restricted affine optimum is strictly positive,
    // the best one maximizes 1^T S_m^-1 1 (its objective is the reciprocal).
    double best_score = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    const std::uint32_t subsets = 1u << m;
    std::vector<Eigen::Index> idx;
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
        idx.clear();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (mask & (1u << i)) idx.push_back(i);
        }
        const auto s = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd sub(s, s);
        for (Eigen::Index a = 0; a < s; ++a)
            for (Eigen::Index b = 0; b < s; ++b) sub(a, b) = block(idx[a], idx[b]);
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success) continue;
        const Eigen::VectorXd v = llt.solve(Eigen::VectorXd::Ones(s));
        if (!v.allFinite() || (v.array() <= 0.0).any()) continue;
        const double score = v.sum();
        if (score > best_score) {
            best_score = score;
            best = Eigen::VectorXd::Zero(m);
            for (Eigen::Index a = 0; a < s; ++a) best(idx[a]) = v(a) / score;
        }
    }
    if (best.size() == 0) {
        throw NumericError("no admissible support for convex weights");
    }
    return best;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const auto n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        cumulative += u[static_cast<std::size_t>(i)];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

Eigen::VectorXd simplex_weights_iterative(const Eigen::MatrixXd& block) {
    constexpr int kMaxIterations = 10000;
    constexpr double kTolerance = 1e-10;
    const auto m = block.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block, Eigen::EigenvaluesOnly);
    const double lipschitz = 2.0 * eig.eigenvalues().maxCoeff();
    if (!(lipschitz > 0.0)) {
        throw NumericError("convex fallback: block is not positive definite");
    }
    const double step = 1.0 / lipschitz;

    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    double objective = quadratic(block, w);
    for (int it = 0; it < kMaxIterations; ++it) {
        Eigen::VectorXd next = project_simplex(w - step * 2.0 * (block * w));
        const double next_objective = quadratic(block, next);
        const double decrease = objective - next_objective;
        w = std::move(next);
        objective = next_objective;
        if (decrease <= kTolerance * std::max(1.0, std::abs(objective)) && decrease >= 0.0) {
            break;
        }
    }

    // Active-set polish from the detected support: solve the affine problem on
    // the support, step back to feasibility when a weight turns nonpositive,
    // and admit the off-support index that most violates the KKT conditions.
    std::vector<bool> active(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) active[static_cast<std::size_t>(i)] = w(i) > 1e-12;
    Eigen::VectorXd x = w / w.sum();
    for (Eigen::Index i = 0; i < m; ++i)
        if (!active[static_cast<std::size_t>(i)]) x(i) = 0.0;
    x /= x.sum();
    for (int round = 0; round < 4 * static_cast<int>(m) + 10; ++round) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < m; ++i)
            if (active[static_cast<std::size_t>(i)]) support.push_back(i);
        const auto s = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd sub(s, s);
        for (Eigen::Index a = 0; a < s; ++a)
            for (Eigen::Index b = 0; b < s; ++b) sub(a, b) = block(support[a], support[b]);
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success) break;
        const Eigen::VectorXd v = llt.solve(Eigen::VectorXd::Ones(s));
        if (!v.allFinite()) break;
        const Eigen::VectorXd target = v / v.sum();

        if ((target.array() <= 0.0).any()) {
            // Move from x toward the target until the first weight hits zero.
            double t = 1.0;
            Eigen::Index blocking = -1;
            for (Eigen::Index a = 0; a < s; ++a) {
                const double from = x(support[a]);
                if (target(a) <= 0.0 && from - target(a) > 0.0) {
                    const double ta = from / (from - target(a));
                    if (ta < t) {
                        t = ta;
                        blocking = support[a];
                    }
                }
            }
            for (Eigen::Index a = 0; a < s; ++a) x(support[a]) += t * (target(a) - x(support[a]));
            if (blocking < 0) break;
            x(blocking) = 0.0;
            active[static_cast<std::size_t>(blocking)] = false;
            x = x.cwiseMax(0.0);
            x /= x.sum();
            continue;
        }

        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(m);
        for (Eigen::Index a = 0; a < s; ++a) candidate(support[a]) = target(a);
        x = candidate;
        const Eigen::VectorXd grad = block * x;
        const double level = x.dot(grad);
        Eigen::Index entering = -1;
        double worst = 1e-12 * std::max(1.0, std::abs(level));
        for (Eigen::Index i = 0; i < m; ++i) {
            if (active[static_cast<std::size_t>(i)]) continue;
            if (level - grad(i) > worst) {
                worst = level - grad(i);
                entering = i;
            }
        }
        if (entering < 0) break;
        active[static_cast<std::size_t>(entering)] = true;
    }
    return quadratic(block, x) <= objective ? x : Eigen::VectorXd(w / w.sum());
}

}  // namespace detail

}  // namespace estavg
