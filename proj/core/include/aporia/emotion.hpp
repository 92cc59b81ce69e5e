#pragma once

#include "aporia/distance.hpp"
#include "aporia/knowledge.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::emotion {

// Real interval with per-end closedness, written in the usual bracket
// notation: "[0.2,1]", "(-0.3,0.3)", "[0,0.2)".
struct Range {
    double lower = 0.0;
    double upper = 0.0;
    bool lower_closed = true;
    bool upper_closed = false;

    bool contains(double x) const noexcept;
    std::string to_string() const;
    static Range parse(std::string_view text);

    bool operator==(const Range&) const = default;
};

struct CompositionCell {
    Range valence;
    Range pi;
    std::string label;

    bool operator==(const CompositionCell&) const = default;
};

// The agreed emotion set E plus a table mapping (valence, pi) to a label.
// The cells must tile [-1,1] x [0,1] exactly once.
class EmotionTaxonomy {
public:
    EmotionTaxonomy(std::string id, std::vector<std::string> emotions, std::vector<CompositionCell> cells);

    const std::string& id() const noexcept { return id_; }
    const std::vector<std::string>& emotions() const noexcept { return emotions_; }
    const std::vector<CompositionCell>& cells() const noexcept { return cells_; }
    bool contains(std::string_view label) const noexcept;

    const std::string& lookup(double valence, double pi) const;

private:
    std::string id_;
    std::vector<std::string> emotions_;
    std::vector<CompositionCell> cells_;
};

// neutral below pi 0.2; above it fear for valence <= -0.3, amusement for
// valence >= 0.3 and surprise in between. "sadness" is in E but owns no cell.
EmotionTaxonomy default_taxonomy();

EmotionTaxonomy parse_taxonomy(std::string_view json_text);
EmotionTaxonomy load_taxonomy(const std::filesystem::path& path);
std::string to_json(const EmotionTaxonomy& tax);

class ToneLexicon {
public:
    using Entries = std::map<std::string, double, std::less<>>;

    ToneLexicon(std::string id, Entries entries);

    const std::string& id() const noexcept { return id_; }
    const Entries& entries() const noexcept { return entries_; }
    std::optional<double> valence_of(std::string_view term) const;

private:
    std::string id_;
    Entries entries_;
};

ToneLexicon parse_lexicon(std::string_view json_text);
ToneLexicon load_lexicon(const std::filesystem::path& path);

std::string answer(std::string_view premise, std::string_view question, const knowledge::KnowledgeBase& kb);

// Mean valence of every lexicon hit across all texts, duplicates counted;
// 0 without hits.
double tone(std::span<const std::string> texts, const ToneLexicon& lexicon);

std::string compose(double valence, const distance::AporiaResult& pi, const EmotionTaxonomy& tax);

struct ListenerPipelineResult {
    std::string r;
    double pi = 0.0;
    double valence = 0.0;
    std::string emotion;
    distance::AporiaResult aporia;

    bool operator==(const ListenerPipelineResult&) const = default;
};

ListenerPipelineResult run_listener_pipeline(std::string_view premise,
                                             std::string_view question,
                                             std::string_view r_prime,
                                             const knowledge::KnowledgeBase& kb,
                                             const distance::DistanceSpec& spec,
                                             const ToneLexicon& lexicon,
                                             const EmotionTaxonomy& tax);

}  // namespace aporia::emotion
