#include "aporia/distance.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace aporia {

std::string describe(const Payload& p)
{
    if (const auto* s = std::get_if<std::string>(&p)) {
        return *s;
    }
    return fmt::format("{}", std::get<double>(p));
}

}  // namespace aporia

namespace aporia::distance {

using nlohmann::json;

std::string_view to_string(DistanceKind kind) noexcept
{
    switch (kind) {
    case DistanceKind::NumericAbs: return "numeric_abs";
    case DistanceKind::NumericRelative: return "numeric_rel";
    case DistanceKind::TokenSimilarity: return "token_similarity";
    case DistanceKind::TheoryCost: return "theory_cost";
    }
    return "token_similarity";
}

DistanceKind distance_kind_from_string(std::string_view name)
{
    for (auto kind : {DistanceKind::NumericAbs, DistanceKind::NumericRelative,
                      DistanceKind::TokenSimilarity, DistanceKind::TheoryCost}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw Error(Errc::not_found, fmt::format("unknown distance kind '{}'", name));
}

void validate(const DistanceSpec& spec)
{
    if (spec.kind == DistanceKind::TheoryCost && spec.theory_id.empty()) {
        throw Error(Errc::invalid_argument, "theory_cost distance needs a theory id");
    }
    if (spec.kind == DistanceKind::TokenSimilarity && !has_tokenizer(spec.tokenizer)) {
        throw Error(Errc::not_found, fmt::format("unknown tokenizer '{}'", spec.tokenizer));
    }
}

std::string to_json(const DistanceSpec& spec)
{
    json doc = {{"kind", to_string(spec.kind)}};
    if (spec.kind == DistanceKind::TheoryCost) {
        doc["theory"] = spec.theory_id;
    }
    if (spec.kind == DistanceKind::TokenSimilarity) {
        doc["tokenizer"] = spec.tokenizer;
    }
    return doc.dump();
}

DistanceSpec parse_distance_spec(std::string_view json_text)
{
    const json doc = detail::parse_json(json_text, "distance spec");
    DistanceSpec spec = detail::with_parse_errors("distance spec", [&] {
        DistanceSpec s;
        s.kind = distance_kind_from_string(doc.at("kind").get<std::string>());
        s.theory_id = doc.value("theory", std::string{});
        s.tokenizer = doc.value("tokenizer", std::string{"default"});
        return s;
    });
    validate(spec);
    return spec;
}

bool has_tokenizer(std::string_view tokenizer) noexcept
{
    return tokenizer == "default" || tokenizer == "whitespace";
}

std::vector<std::string> tokenize(std::string_view text, std::string_view tokenizer)
{
    if (!has_tokenizer(tokenizer)) {
        throw Error(Errc::not_found, fmt::format("unknown tokenizer '{}'", tokenizer));
    }
    const bool whitespace_only = tokenizer == "whitespace";
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool keep = whitespace_only ? !std::isspace(c) : std::isalnum(c) != 0;
        if (keep) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b)
{
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const std::size_t united = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

AporiaResult theory_distance(const knowledge::Theory& theory, const knowledge::KnowledgeBase& kb)
{
    const auto& registered = kb.theory(theory.id);
    const double gamma = registered.cost;
    const double threshold = kb.threshold();

    AporiaResult result;
    result.pi = gamma < threshold ? gamma : 0.0;
    result.normalized = true;
    result.decomposition.kind = DistanceKind::TheoryCost;
    result.decomposition.theory_id = registered.id;
    result.decomposition.gamma = gamma;
    result.decomposition.threshold = threshold;
    return result;
}

namespace {

double number_of(const Payload& p, std::string_view role)
{
    if (const auto* v = std::get_if<double>(&p)) {
        return *v;
    }
    throw Error(Errc::type_mismatch, fmt::format("numeric distance needs a number for {}", role));
}

const std::string& text_of(const Payload& p, std::string_view role)
{
    if (const auto* s = std::get_if<std::string>(&p)) {
        return *s;
    }
    throw Error(Errc::type_mismatch, fmt::format("text distance needs text for {}", role));
}

std::set<std::string> token_set(const std::string& text, std::string_view tokenizer)
{
    auto tokens = tokenize(text, tokenizer);
    return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())};
}

}  // namespace

AporiaResult answer_distance(const Payload& r, const Payload& r_prime, const DistanceSpec& spec)
{
    validate(spec);
    AporiaResult result;
    result.decomposition.kind = spec.kind;
    result.decomposition.answer = r;
    result.decomposition.reveal = r_prime;
    result.normalized = spec.normalized();

    switch (spec.kind) {
    case DistanceKind::NumericAbs: {
        const double a = number_of(r, "R");
        const double b = number_of(r_prime, "R'");
        result.pi = std::abs(a - b);
        break;
    }
    case DistanceKind::NumericRelative: {
        const double a = number_of(r, "R");
        const double b = number_of(r_prime, "R'");
        const double scale = std::max({std::abs(a), std::abs(b), 1.0});
        result.pi = std::min(1.0, std::abs(a - b) / scale);
        break;
    }
    case DistanceKind::TokenSimilarity: {
        const auto& a = text_of(r, "R");
        const auto& b = text_of(r_prime, "R'");
        result.pi = 1.0 - jaccard_similarity(token_set(a, spec.tokenizer), token_set(b, spec.tokenizer));
        break;
    }
    case DistanceKind::TheoryCost:
        throw Error(Errc::invalid_argument, "theory_cost distance needs a knowledge base; use compute_aporia");
    }
    return result;
}

std::vector<knowledge::TheorySet> rejection_candidates(const knowledge::KnowledgeBase& kb,
                                                       const std::string& reveal,
                                                       const DistanceSpec& spec)
{
    std::vector<knowledge::TheorySet> candidates;
    if (!kb.has_proposition(reveal)) {
        candidates.push_back({spec.theory_id});
        return candidates;
    }
    for (const auto& [id, theory] : kb.theories()) {
        if (knowledge::evaluate(kb, reveal, theory) == knowledge::TruthValue::False) {
            candidates.push_back({id});
        }
    }
    return candidates;
}

AporiaResult compute_aporia(const knowledge::KnowledgeBase& kb,
                            const AporiaInputs& inputs,
                            const DistanceSpec& spec)
{
    validate(spec);
    AporiaResult result;
    if (spec.kind != DistanceKind::TheoryCost) {
        result = answer_distance(inputs.answer, inputs.reveal, spec);
    } else {
        if (kb.find_theory(spec.theory_id) == nullptr) {
            throw Error(Errc::not_found,
                        fmt::format("theory '{}' absent from knowledge base '{}'", spec.theory_id, kb.id()));
        }
        const auto& r = text_of(inputs.answer, "R");
        const auto& r_prime = text_of(inputs.reveal, "R'");
        auto candidates = r == r_prime ? std::vector<knowledge::TheorySet>{}
                                       : rejection_candidates(kb, r_prime, spec);
        if (candidates.empty()) {
            // Nothing has to be given up, so there is no incongruity to measure.
            result.pi = 0.0;
            result.normalized = true;
            result.decomposition.kind = DistanceKind::TheoryCost;
            result.decomposition.threshold = kb.threshold();
        } else {
            const auto chosen = knowledge::least_cost_explanation(r_prime, candidates, kb);
            result = theory_distance(kb.theory(*chosen.begin()), kb);
        }
        result.decomposition.answer = inputs.answer;
        result.decomposition.reveal = inputs.reveal;
    }
    result.decomposition.premise = inputs.premise;
    result.decomposition.question = inputs.question;
    return result;
}

}  // namespace aporia::distance
