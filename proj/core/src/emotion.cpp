#include "aporia/emotion.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <set>

namespace aporia::emotion {

using nlohmann::json;

bool Range::contains(double x) const noexcept
{
    const bool above = lower_closed ? x >= lower : x > lower;
    const bool below = upper_closed ? x <= upper : x < upper;
    return above && below;
}

std::string Range::to_string() const
{
    return fmt::format("{}{},{}{}", lower_closed ? '[' : '(', lower, upper, upper_closed ? ']' : ')');
}

namespace {

double parse_bound(std::string_view text, std::string_view whole)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(Errc::parse_error, fmt::format("bad interval bound in '{}'", whole));
    }
    return value;
}

}  // namespace

Range Range::parse(std::string_view text)
{
    if (text.size() < 5) {
        throw Error(Errc::parse_error, fmt::format("bad interval '{}'", text));
    }
    Range r;
    const char open = text.front();
    const char close = text.back();
    if ((open != '[' && open != '(') || (close != ']' && close != ')')) {
        throw Error(Errc::parse_error, fmt::format("interval '{}' needs bracket notation", text));
    }
    const auto inner = text.substr(1, text.size() - 2);
    const auto comma = inner.find(',');
    if (comma == std::string_view::npos) {
        throw Error(Errc::parse_error, fmt::format("interval '{}' needs two bounds", text));
    }
    r.lower_closed = open == '[';
    r.upper_closed = close == ']';
    r.lower = parse_bound(inner.substr(0, comma), text);
    r.upper = parse_bound(inner.substr(comma + 1), text);
    if (!(r.lower < r.upper)) {
        throw Error(Errc::parse_error, fmt::format("interval '{}' is empty", text));
    }
    return r;
}

namespace {

// Points and the open gaps between consecutive breakpoints; each is an atom
// that every cell either fully contains or misses.
std::vector<double> atom_samples(std::set<double> breaks)
{
    std::vector<double> samples;
    double prev = 0.0;
    bool first = true;
    for (double b : breaks) {
        if (!first) {
            samples.push_back(prev + (b - prev) / 2.0);
        }
        samples.push_back(b);
        prev = b;
        first = false;
    }
    return samples;
}

void check_tiling(const std::string& id, const std::vector<CompositionCell>& cells)
{
    std::set<double> valence_breaks{-1.0, 1.0};
    std::set<double> pi_breaks{0.0, 1.0};
    for (const auto& c : cells) {
        if (c.valence.lower < -1.0 || c.valence.upper > 1.0 || c.pi.lower < 0.0 || c.pi.upper > 1.0) {
            throw Error(Errc::invalid_argument,
                        fmt::format("taxonomy '{}': cell '{}' leaves the valence/pi domain", id, c.label));
        }
        valence_breaks.insert({c.valence.lower, c.valence.upper});
        pi_breaks.insert({c.pi.lower, c.pi.upper});
    }
    for (double v : atom_samples(valence_breaks)) {
        for (double p : atom_samples(pi_breaks)) {
            const auto hits = std::count_if(cells.begin(), cells.end(), [&](const CompositionCell& c) {
                return c.valence.contains(v) && c.pi.contains(p);
            });
            if (hits != 1) {
                throw Error(Errc::invalid_argument,
                            fmt::format("taxonomy '{}': point (valence {}, pi {}) is covered by {} cells", id, v,
                                        p, hits));
            }
        }
    }
}

}  // namespace

EmotionTaxonomy::EmotionTaxonomy(std::string id, std::vector<std::string> emotions, std::vector<CompositionCell> cells)
    : id_(std::move(id)), emotions_(std::move(emotions)), cells_(std::move(cells))
{
    std::set<std::string> unique(emotions_.begin(), emotions_.end());
    if (emotions_.size() < 2 || unique.size() != emotions_.size()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("taxonomy '{}' needs at least two distinct emotions", id_));
    }
    for (const auto& c : cells_) {
        if (!unique.contains(c.label)) {
            throw Error(Errc::invalid_argument,
                        fmt::format("taxonomy '{}': cell label '{}' is not an emotion of the set", id_, c.label));
        }
    }
    check_tiling(id_, cells_);
}

bool EmotionTaxonomy::contains(std::string_view label) const noexcept
{
    return std::find(emotions_.begin(), emotions_.end(), label) != emotions_.end();
}

const std::string& EmotionTaxonomy::lookup(double valence, double pi) const
{
    if (!(valence >= -1.0 && valence <= 1.0) || !(pi >= 0.0 && pi <= 1.0)) {
        throw Error(Errc::invalid_argument, fmt::format("(valence {}, pi {}) outside [-1,1] x [0,1]", valence, pi));
    }
    for (const auto& c : cells_) {
        if (c.valence.contains(valence) && c.pi.contains(pi)) {
            return c.label;
        }
    }
    // Unreachable for a validated tiling.
    throw Error(Errc::not_found, "no composition cell matches");
}

EmotionTaxonomy default_taxonomy()
{
    return EmotionTaxonomy(
        "default", {"neutral", "amusement", "fear", "surprise", "sadness"},
        {
            {Range::parse("[-1,1]"), Range::parse("[0,0.2)"), "neutral"},
            {Range::parse("[-1,-0.3]"), Range::parse("[0.2,1]"), "fear"},
            {Range::parse("(-0.3,0.3)"), Range::parse("[0.2,1]"), "surprise"},
            {Range::parse("[0.3,1]"), Range::parse("[0.2,1]"), "amusement"},
        });
}

EmotionTaxonomy parse_taxonomy(std::string_view json_text)
{
    const json doc = detail::parse_json(json_text, "taxonomy");
    return detail::with_parse_errors("taxonomy", [&] {
        std::vector<CompositionCell> cells;
        for (const auto& c : doc.at("cells")) {
            cells.push_back({Range::parse(c.at("valence").get<std::string>()),
                             Range::parse(c.at("pi").get<std::string>()), c.at("label").get<std::string>()});
        }
        return EmotionTaxonomy(doc.at("id").get<std::string>(), doc.at("emotions").get<std::vector<std::string>>(),
                               std::move(cells));
    });
}

EmotionTaxonomy load_taxonomy(const std::filesystem::path& path)
{
    return parse_taxonomy(detail::read_file(path));
}

std::string to_json(const EmotionTaxonomy& tax)
{
    json cells = json::array();
    for (const auto& c : tax.cells()) {
        cells.push_back({{"valence", c.valence.to_string()}, {"pi", c.pi.to_string()}, {"label", c.label}});
    }
    return json{{"id", tax.id()}, {"emotions", tax.emotions()}, {"cells", cells}}.dump(2);
}

ToneLexicon::ToneLexicon(std::string id, Entries entries) : id_(std::move(id)), entries_(std::move(entries))
{
    for (const auto& [term, valence] : entries_) {
        if (term.empty() || term != detail::ascii_lower(term)) {
            throw Error(Errc::invalid_argument, fmt::format("lexicon '{}': term '{}' must be lowercase", id_, term));
        }
        if (!(valence >= -1.0 && valence <= 1.0)) {
            throw Error(Errc::invalid_argument,
                        fmt::format("lexicon '{}': valence of '{}' outside [-1,1]", id_, term));
        }
    }
}

std::optional<double> ToneLexicon::valence_of(std::string_view term) const
{
    auto it = entries_.find(term);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ToneLexicon parse_lexicon(std::string_view json_text)
{
    const json doc = detail::parse_json(json_text, "lexicon");
    return detail::with_parse_errors("lexicon", [&] {
        ToneLexicon::Entries entries;
        for (const auto& [term, valence] : doc.at("entries").items()) {
            entries.emplace(term, valence.get<double>());
        }
        return ToneLexicon(doc.at("id").get<std::string>(), std::move(entries));
    });
}

ToneLexicon load_lexicon(const std::filesystem::path& path)
{
    return parse_lexicon(detail::read_file(path));
}

std::string answer(std::string_view premise, std::string_view question, const knowledge::KnowledgeBase& kb)
{
    if (!kb.has_catch_all()) {
        throw Error(Errc::invalid_argument, fmt::format("knowledge base '{}' has no catch-all rule", kb.id()));
    }
    std::string text(premise);
    text += '\n';
    text += question;
    return kb.respond(text);
}

double tone(std::span<const std::string> texts, const ToneLexicon& lexicon)
{
    double sum = 0.0;
    std::size_t hits = 0;
    for (const auto& text : texts) {
        for (const auto& token : distance::tokenize(text)) {
            if (auto v = lexicon.valence_of(token)) {
                sum += *v;
                ++hits;
            }
        }
    }
    if (hits == 0) {
        return 0.0;
    }
    return std::clamp(sum / static_cast<double>(hits), -1.0, 1.0);
}

std::string compose(double valence, const distance::AporiaResult& pi, const EmotionTaxonomy& tax)
{
    if (!pi.normalized) {
        throw Error(Errc::invalid_argument, "emotion composition needs a normalized aporia level");
    }
    return tax.lookup(valence, pi.pi);
}

ListenerPipelineResult run_listener_pipeline(std::string_view premise,
                                             std::string_view question,
                                             std::string_view r_prime,
                                             const knowledge::KnowledgeBase& kb,
                                             const distance::DistanceSpec& spec,
                                             const ToneLexicon& lexicon,
                                             const EmotionTaxonomy& tax)
{
    if (!spec.normalized()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("distance {} is not normalized", distance::to_string(spec.kind)));
    }
    if (spec.numeric()) {
        throw Error(Errc::type_mismatch, "the listener pipeline works on text answers");
    }
    ListenerPipelineResult out;
    out.r = answer(premise, question, kb);
    distance::AporiaInputs inputs{std::string(premise), std::string(question), out.r, std::string(r_prime)};
    out.aporia = distance::compute_aporia(kb, inputs, spec);
    out.pi = out.aporia.pi;
    const std::string texts[] = {std::string(premise), std::string(question), std::string(r_prime)};
    out.valence = tone(texts, lexicon);
    out.emotion = compose(out.valence, out.aporia, tax);
    return out;
}

}  // namespace aporia::emotion
