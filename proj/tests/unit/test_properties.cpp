#include "properties.hpp"

#include <gtest/gtest.h>

namespace {

using namespace aporia::testing;

TEST(Properties, AllSuitesPassWithinBudget)
{
    double total = 0.0;
    for (const auto& r : all_properties(20240601)) {
        EXPECT_TRUE(r.ok()) << r.name << ": " << r.failures << " failures, first: " << r.counterexample;
        EXPECT_GE(r.cases, default_cases) << r.name;
        total += r.seconds;
    }
    EXPECT_LT(total, 60.0);
}

TEST(Properties, DifferentSeedsAgree)
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (const auto& r : all_properties(seed, 2000)) {
            EXPECT_TRUE(r.ok()) << r.name << " seed " << seed << ": " << r.counterexample;
        }
    }
}

}  // namespace
