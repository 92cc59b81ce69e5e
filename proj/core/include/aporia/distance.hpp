#pragma once

#include "aporia/knowledge.hpp"
#include "aporia/payload.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::distance {

enum class DistanceKind { NumericAbs, NumericRelative, TokenSimilarity, TheoryCost };

// Wire names: "numeric_abs", "numeric_rel", "token_similarity", "theory_cost".
std::string_view to_string(DistanceKind kind) noexcept;
DistanceKind distance_kind_from_string(std::string_view name);

struct DistanceSpec {
    DistanceKind kind = DistanceKind::TokenSimilarity;
    std::string theory_id;               // TheoryCost only
    std::string tokenizer = "default";   // TokenSimilarity only

    bool normalized() const noexcept { return kind != DistanceKind::NumericAbs; }
    bool numeric() const noexcept
    {
        return kind == DistanceKind::NumericAbs || kind == DistanceKind::NumericRelative;
    }

    bool operator==(const DistanceSpec&) const = default;
};

void validate(const DistanceSpec& spec);

std::string to_json(const DistanceSpec& spec);
DistanceSpec parse_distance_spec(std::string_view json_text);

// What went into a measurement.
struct Decomposition {
    DistanceKind kind = DistanceKind::TokenSimilarity;
    std::optional<std::string> premise;
    std::optional<std::string> question;
    std::optional<Payload> answer;
    std::optional<Payload> reveal;
    std::optional<std::string> theory_id;
    std::optional<double> gamma;
    std::optional<double> threshold;

    bool operator==(const Decomposition&) const = default;
};

struct AporiaResult {
    double pi = 0.0;
    bool normalized = true;
    Decomposition decomposition;

    bool operator==(const AporiaResult&) const = default;
};

// Tokenizers are selected by id; "default" lowercases and splits on
// non-alphanumerics, "whitespace" lowercases and splits on blanks only.
std::vector<std::string> tokenize(std::string_view text, std::string_view tokenizer = "default");
bool has_tokenizer(std::string_view tokenizer) noexcept;

// |A ∩ B| / |A ∪ B|, defined as 1 when both sets are empty.
double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b);

AporiaResult theory_distance(const knowledge::Theory& theory, const knowledge::KnowledgeBase& kb);

AporiaResult answer_distance(const Payload& r, const Payload& r_prime, const DistanceSpec& spec);

struct AporiaInputs {
    std::optional<std::string> premise;
    std::optional<std::string> question;
    Payload answer;
    Payload reveal;
};

// Theories the Listener would have to give up to accept `reveal`: every
// theory holding the reveal false, or the spec's declared theory when the
// reveal is not a registered proposition.
std::vector<knowledge::TheorySet> rejection_candidates(const knowledge::KnowledgeBase& kb,
                                                       const std::string& reveal,
                                                       const DistanceSpec& spec);

AporiaResult compute_aporia(const knowledge::KnowledgeBase& kb,
                            const AporiaInputs& inputs,
                            const DistanceSpec& spec);

}  // namespace aporia::distance
