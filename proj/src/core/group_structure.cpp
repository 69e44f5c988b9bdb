#include "estavg/core/group_structure.hpp"

#include "estavg/errors.hpp"

#include <cmath>
#include <string>

namespace estavg {

GroupStructure::GroupStructure(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) {
        throw DomainError("group structure needs at least one parameter");
    }
    offsets_.reserve(sizes_.size());
    for (std::size_t s : sizes_) {
        if (s == 0) {
            throw DomainError("every parameter needs at least one estimator");
        }
        offsets_.push_back(total_);
        total_ += s;
    }
}

std::size_t GroupStructure::group_of(std::size_t row) const {
    if (row >= total_) {
        throw DomainError("estimator row " + std::to_string(row) + " out of range");
    }
    std::size_t j = 0;
    while (row >= offsets_[j] + sizes_[j]) {
        ++j;
    }
    return j;
}

GroupStructure GroupStructure::without(std::size_t row) const {
    auto sizes = sizes_;
    std::size_t& s = sizes[group_of(row)];
    if (s == 1) {
        throw DomainError("cannot remove the only estimator of a parameter");
    }
    --s;
    return GroupStructure(std::move(sizes));
}

Eigen::MatrixXd build_selector(const GroupStructure& group) {
    const auto k = static_cast<Eigen::Index>(group.estimators());
    const auto d = static_cast<Eigen::Index>(group.parameters());
    Eigen::MatrixXd selector = Eigen::MatrixXd::Zero(k, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto g = static_cast<std::size_t>(j);
        selector.block(static_cast<Eigen::Index>(group.offset(g)), j,
                       static_cast<Eigen::Index>(group.size(g)), 1)
            .setOnes();
    }
    return selector;
}

EstimatorVector::EstimatorVector(Eigen::VectorXd values, GroupStructure group)
    : values_(std::move(values)), group_(std::move(group)) {
    if (static_cast<std::size_t>(values_.size()) != group_.estimators()) {
        throw DomainError("estimator vector length does not match its group structure");
    }
    if (!values_.allFinite()) {
        throw DomainError("estimator vector has non-finite entries");
    }
}

}  // namespace estavg
