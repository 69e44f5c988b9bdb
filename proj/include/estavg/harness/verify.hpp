#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace estavg::harness {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Randomized checks of the averaging invariants: constraint feasibility,
/// optimality within each constraint set, nesting of the four sets, the
/// divergence bound, the oracle-distance bound, SPD repair, interval
/// containment, the location closed form, and seed determinism. `trials`
/// random instances per check.
[[nodiscard]] std::vector<CheckResult> run_property_suite(std::uint64_t seed, std::size_t trials = 200);

}  // namespace estavg::harness
