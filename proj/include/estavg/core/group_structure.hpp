#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace estavg {

/// Sizes (k_1, ..., k_d) of the estimator collections, one collection per
/// parameter. Estimators are stacked group after group.
class GroupStructure {
public:
    explicit GroupStructure(std::vector<std::size_t> sizes);
    GroupStructure(std::initializer_list<std::size_t> sizes)
        : GroupStructure(std::vector<std::size_t>(sizes)) {}

    [[nodiscard]] std::size_t parameters() const noexcept { return sizes_.size(); }
    [[nodiscard]] std::size_t estimators() const noexcept { return total_; }
    [[nodiscard]] std::size_t size(std::size_t group) const { return sizes_.at(group); }
    /// Row index of the first estimator in `group`.
    [[nodiscard]] std::size_t offset(std::size_t group) const { return offsets_.at(group); }
    /// Group owning estimator row `row`.
    [[nodiscard]] std::size_t group_of(std::size_t row) const;
    [[nodiscard]] std::span<const std::size_t> sizes() const noexcept { return sizes_; }

    /// Same structure with estimator `row` removed; throws if its group would
    /// become empty.
    [[nodiscard]] GroupStructure without(std::size_t row) const;

    friend bool operator==(const GroupStructure& a, const GroupStructure& b) {
        return a.sizes_ == b.sizes_;
    }

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

/// The k x d selector J: J(i, j) = 1 iff estimator i targets parameter j.
[[nodiscard]] Eigen::MatrixXd build_selector(const GroupStructure& group);

/// Stacked estimates T in R^k together with their group structure.
class EstimatorVector {
public:
    EstimatorVector(Eigen::VectorXd values, GroupStructure group);

    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
    [[nodiscard]] const GroupStructure& group() const noexcept { return group_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

private:
    Eigen::VectorXd values_;
    GroupStructure group_;
};

}  // namespace estavg
