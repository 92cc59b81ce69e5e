#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aporia::acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::function<Outcome()> check;
};

std::vector<Criterion> criteria();

}  // namespace aporia::acceptance
