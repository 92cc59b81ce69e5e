#include "criteria.hpp"

#include <fmt/format.h>

#include <exception>

int main()
{
    int failed = 0;
    for (const auto& c : aporia::acceptance::criteria()) {
        aporia::acceptance::Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, fmt::format("threw: {}", e.what())};
        }
        failed += out.pass ? 0 : 1;
        fmt::print("{} {}: {}\n", out.pass ? "PASS" : "FAIL", c.name, out.detail);
    }
    return failed == 0 ? 0 : 1;
}
