#include "aporia/policy.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <cctype>
#include <vector>

namespace aporia::trust {

namespace {

enum class Tok { Ident, LParen, RParen, And, Or, Not, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
    while (i < src.size()) {
        const unsigned char c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (std::isalpha(c) || c == '_') {
            const std::size_t start = i;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            const auto word = detail::ascii_lower(src.substr(start, i - start));
            if (word == "and") out.push_back({Tok::And, word, start});
            else if (word == "or") out.push_back({Tok::Or, word, start});
            else if (word == "not") out.push_back({Tok::Not, word, start});
            else out.push_back({Tok::Ident, word, start});
        } else if (c == '(') {
            out.push_back({Tok::LParen, "(", i++});
        } else if (c == ')') {
            out.push_back({Tok::RParen, ")", i++});
        } else if (starts("&&") || starts("||")) {
            out.push_back({src[i] == '&' ? Tok::And : Tok::Or, std::string(src.substr(i, 2)), i});
            i += 2;
        } else if (c == '&' || c == '|' || c == '!') {
            out.push_back({c == '&' ? Tok::And : c == '|' ? Tok::Or : Tok::Not, std::string(1, src[i]), i});
            ++i;
        } else if (starts("∧") || starts("∨") || starts("¬")) {
            const bool neg = starts("¬");
            const std::size_t len = neg ? 2 : 3;
            out.push_back({neg ? Tok::Not : starts("∧") ? Tok::And : Tok::Or, std::string(src.substr(i, len)), i});
            i += len;
        } else {
            throw Error(Errc::parse_error, fmt::format("policy: unexpected character at offset {}", i));
        }
    }
    out.push_back({Tok::End, "", src.size()});
    return out;
}

using Node = std::shared_ptr<const PolicyExpr>;

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    Node parse()
    {
        auto e = parse_or();
        expect(Tok::End, "end of policy");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    void expect(Tok kind, std::string_view what)
    {
        if (peek().kind != kind) {
            throw Error(Errc::parse_error, fmt::format("policy: expected {} at offset {}", what, peek().pos));
        }
        ++pos_;
    }

    static Node binary(PolicyExpr::Op op, Node lhs, Node rhs)
    {
        auto n = std::make_shared<PolicyExpr>();
        n->op = op;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    Node parse_or()
    {
        auto lhs = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            lhs = binary(PolicyExpr::Op::Or, lhs, parse_and());
        }
        return lhs;
    }

    Node parse_and()
    {
        auto lhs = parse_unary();
        while (peek().kind == Tok::And) {
            take();
            lhs = binary(PolicyExpr::Op::And, lhs, parse_unary());
        }
        return lhs;
    }

    Node parse_unary()
    {
        if (peek().kind == Tok::Not) {
            take();
            auto n = std::make_shared<PolicyExpr>();
            n->op = PolicyExpr::Op::Not;
            n->lhs = parse_unary();
            return n;
        }
        return parse_primary();
    }

    Node parse_primary()
    {
        if (peek().kind == Tok::LParen) {
            take();
            auto e = parse_or();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (peek().kind != Tok::Ident) {
            throw Error(Errc::parse_error, fmt::format("policy: expected an atom at offset {}", peek().pos));
        }
        const Token word = take();
        auto n = std::make_shared<PolicyExpr>();
        if (word.text == "true" || word.text == "false") {
            n->op = PolicyExpr::Op::Const;
            n->value = word.text == "true";
            return n;
        }
        if (word.text != "happy" && word.text != "bored") {
            throw Error(Errc::parse_error, fmt::format("policy: unknown predicate '{}'", word.text));
        }
        n->op = word.text == "happy" ? PolicyExpr::Op::Happy : PolicyExpr::Op::Bored;
        expect(Tok::LParen, "'('");
        if (peek().kind != Tok::Ident) {
            throw Error(Errc::parse_error, fmt::format("policy: expected a resource at offset {}", peek().pos));
        }
        try {
            n->resource = resource_from_string(take().text);
        } catch (const Error& e) {
            throw Error(Errc::parse_error, fmt::format("policy: {}", e.what()));
        }
        expect(Tok::RParen, "')'");
        return n;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string render(const PolicyExpr& e)
{
    switch (e.op) {
    case PolicyExpr::Op::Happy: return fmt::format("happy({})", to_string(e.resource));
    case PolicyExpr::Op::Bored: return fmt::format("bored({})", to_string(e.resource));
    case PolicyExpr::Op::Const: return e.value ? "true" : "false";
    case PolicyExpr::Op::Not: return fmt::format("not {}", render(*e.lhs));
    case PolicyExpr::Op::And: return fmt::format("({} and {})", render(*e.lhs), render(*e.rhs));
    case PolicyExpr::Op::Or: return fmt::format("({} or {})", render(*e.lhs), render(*e.rhs));
    }
    return "false";
}

bool eval(const PolicyExpr& e, const EmotionState& state) noexcept
{
    switch (e.op) {
    case PolicyExpr::Op::Happy: return happy(state, e.resource);
    case PolicyExpr::Op::Bored: return bored(state, e.resource);
    case PolicyExpr::Op::Const: return e.value;
    case PolicyExpr::Op::Not: return !eval(*e.lhs, state);
    case PolicyExpr::Op::And: return eval(*e.lhs, state) && eval(*e.rhs, state);
    case PolicyExpr::Op::Or: return eval(*e.lhs, state) || eval(*e.rhs, state);
    }
    return false;
}

}  // namespace

Policy parse_policy(std::string_view text, std::string id)
{
    return Policy{std::move(id), Parser(lex(text)).parse()};
}

std::string to_string(const Policy& policy)
{
    return policy.predicate ? render(*policy.predicate) : "false";
}

bool happy(const EmotionState& state, Resource r) noexcept
{
    const auto* agg = state.find(r);
    return agg && agg->last && agg->last->direction == Direction::Favorable;
}

bool bored(const EmotionState& state, Resource r) noexcept
{
    const auto* agg = state.find(r);
    return agg && agg->last && agg->last->direction == Direction::Unfavorable
           && agg->last->intensity > bored_deviation;
}

bool evaluate_policy(const Policy& policy, const EmotionState& state) noexcept
{
    return policy.predicate && eval(*policy.predicate, state);
}

}  // namespace aporia::trust
