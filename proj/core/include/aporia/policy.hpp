#pragma once

#include "aporia/trust.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace aporia::trust {

// Boolean expression over happy(R) / bored(R) atoms. See docs/policy-grammar.md.
struct PolicyExpr {
    enum class Op { Happy, Bored, Const, Not, And, Or };

    Op op = Op::Const;
    Resource resource = Resource::Money;   // Happy, Bored
    bool value = false;                    // Const
    std::shared_ptr<const PolicyExpr> lhs;  // Not, And, Or
    std::shared_ptr<const PolicyExpr> rhs;  // And, Or
};

struct Policy {
    std::string id;
    std::shared_ptr<const PolicyExpr> predicate;
};

Policy parse_policy(std::string_view text, std::string id = "policy");

// Canonical fully parenthesized form; parse_policy(to_string(p)) is equivalent.
std::string to_string(const Policy& policy);

// happy(R): the last R event is Favorable. bored(R): the last R event is
// Unfavorable with intensity above bored_deviation. Both are false when R was
// never observed.
bool happy(const EmotionState& state, Resource r) noexcept;
bool bored(const EmotionState& state, Resource r) noexcept;

bool evaluate_policy(const Policy& policy, const EmotionState& state) noexcept;

}  // namespace aporia::trust
