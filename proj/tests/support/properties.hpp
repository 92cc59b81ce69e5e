#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace aporia::testing {

struct PropertyResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string counterexample;   // first failure, if any
    double seconds = 0.0;

    bool ok() const noexcept { return failures == 0 && cases > 0; }
};

inline constexpr std::size_t default_cases = 10'000;

PropertyResult distance_symmetry(std::uint64_t seed, std::size_t cases = default_cases);
PropertyResult triangle_inequality(std::uint64_t seed, std::size_t cases = default_cases);
PropertyResult threshold_monotonicity(std::uint64_t seed, std::size_t cases = default_cases);
PropertyResult ledger_replay_determinism(std::uint64_t seed, std::size_t cases = default_cases);
PropertyResult least_cost_bruteforce(std::uint64_t seed, std::size_t cases = default_cases);

std::vector<PropertyResult> all_properties(std::uint64_t seed, std::size_t cases = default_cases);

}  // namespace aporia::testing
