#pragma once

#include "estavg/core/group_structure.hpp"
#include "estavg/core/mse_matrix.hpp"
#include "estavg/errors.hpp"
#include "estavg/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace estavg {

/// Draws a sample of size n from the model at the given parameter.
template <class Sample>
using ModelSimulator = std::function<Sample(const Eigen::VectorXd& parameter, std::size_t n, RngStream& rng)>;

/// Maps a sample to the stacked estimates. `evaluate` throws FitError when an
/// estimator cannot be computed on that sample.
template <class Sample>
struct EstimatorBank {
    GroupStructure group;
    std::function<Eigen::VectorXd(const Sample&)> evaluate;
};

/// Sigma-hat together with bootstrap bookkeeping.
struct MseEstimate {
    MseMatrix sigma;
    std::size_t used = 0;
    std::size_t dropped = 0;
};

/// Sigma(theta0) for a known map theta -> k x k matrix.
template <class Parameter, class SigmaMap>
[[nodiscard]] MseMatrix plugin_mse(SigmaMap&& sigma_map, const Parameter& theta0) {
    return MseMatrix(sigma_map(theta0));
}

namespace detail {

/// Accumulates (1/B) sum_b (T_b - center)(T_b - center)^T in replicate order.
/// Replicate b draws from `rng.child(b)`; failures are counted and skipped.
template <class Replicate>
MseEstimate bootstrap_gram(const Eigen::VectorXd& center, std::size_t replicates, const RngStream& rng,
                           Replicate&& replicate) {
    if (replicates < 2) {
        throw DomainError("bootstrap needs at least 2 replicates");
    }
    const auto k = center.size();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    std::size_t used = 0;
    for (std::size_t b = 0; b < replicates; ++b) {
        RngStream stream = rng.child(b);
        Eigen::VectorXd t;
        try {
            t = replicate(stream);
        } catch (const FitError&) {
            continue;
        } catch (const DomainError&) {
            continue;
        }
        if (t.size() != k || !t.allFinite()) {
            continue;
        }
        const Eigen::VectorXd e = t - center;
        gram.selfadjointView<Eigen::Lower>().rankUpdate(e);
        ++used;
    }
    const std::size_t required = std::max<std::size_t>(2, replicates / 2);
    if (used < required) {
        throw FitError("bootstrap: only " + std::to_string(used) + " of " + std::to_string(replicates) +
                       " replicates succeeded");
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    return {MseMatrix(gram / static_cast<double>(used)), used, replicates - used};
}

}  // namespace detail

/// Parametric bootstrap: simulate B samples at theta0, evaluate the bank, and
/// average outer products of T_b - J theta0. Centering uses the plug-in
/// parameter, not the bootstrap mean.
template <class Sample, class BankInput>
[[nodiscard]] MseEstimate parametric_bootstrap_mse(const ModelSimulator<Sample>& sim, const EstimatorBank<BankInput>& bank,
                                                   const Eigen::VectorXd& theta0, std::size_t replicates,
                                                   std::size_t n, const RngStream& rng) {
    if (static_cast<std::size_t>(theta0.size()) != bank.group.parameters()) {
        throw DomainError("plug-in parameter length must equal the number of parameters");
    }
    const Eigen::VectorXd center = build_selector(bank.group) * theta0;
    return detail::bootstrap_gram(center, replicates, rng, [&](RngStream& stream) {
        const Sample sample = sim(theta0, n, stream);
        return bank.evaluate(sample);
    });
}

/// Resamples `data` with replacement into `out` (same size).
void resample(std::span<const double> data, std::vector<double>& out, RngStream& rng);

/// Nonparametric bootstrap: resample the data B times and average outer
/// products of T_b - center, where `center` is usually the original-sample
/// estimate vector.
template <class Bank>
[[nodiscard]] MseEstimate nonparametric_bootstrap_mse(std::span<const double> data, const Bank& bank,
                                                      const Eigen::VectorXd& center, std::size_t replicates,
                                                      const RngStream& rng) {
    if (data.empty()) {
        throw DomainError("bootstrap needs a nonempty sample");
    }
    std::vector<double> buffer(data.size());
    return detail::bootstrap_gram(center, replicates, rng, [&](RngStream& stream) {
        resample(data, buffer, stream);
        return bank.evaluate(std::span<const double>(buffer));
    });
}

}  // namespace estavg
