#include "estavg/mse_estimation.hpp"

namespace estavg {

void resample(std::span<const double> data, std::vector<double>& out, RngStream& rng) {
    out.resize(data.size());
    const auto n = static_cast<std::uint64_t>(data.size());
    for (double& x : out) {
        x = data[rng.below(n)];
    }
}

}  // namespace estavg
