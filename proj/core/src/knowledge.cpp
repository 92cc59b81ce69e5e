#include "aporia/knowledge.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <limits>

namespace aporia::knowledge {

using nlohmann::json;

std::string_view to_string(TruthValue value) noexcept
{
    switch (value) {
    case TruthValue::True: return "true";
    case TruthValue::False: return "false";
    case TruthValue::Undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

void check_unit(double value, std::string_view what)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(Errc::invalid_argument, fmt::format("{} must lie in [0,1], got {}", what, value));
    }
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::string id,
                             double threshold,
                             std::vector<Theory> theories,
                             std::vector<ResponderRule> rules)
    : id_(std::move(id)), threshold_(threshold), rules_(std::move(rules))
{
    if (id_.empty()) {
        throw Error(Errc::invalid_argument, "knowledge base id must not be empty");
    }
    check_unit(threshold_, "threshold");
    for (auto& t : theories) {
        if (t.id.empty()) {
            throw Error(Errc::invalid_argument, "theory id must not be empty");
        }
        check_unit(t.cost, fmt::format("cost of theory '{}'", t.id));
        for (const auto& p : t.propositions) {
            if (t.negations.contains(p)) {
                throw Error(Errc::invalid_argument,
                            fmt::format("theory '{}' both asserts and negates '{}'", t.id, p));
            }
        }
        propositions_.insert(t.propositions.begin(), t.propositions.end());
        propositions_.insert(t.negations.begin(), t.negations.end());
        std::string key = t.id;
        if (!theories_.emplace(std::move(key), std::move(t)).second) {
            throw Error(Errc::invalid_argument, "duplicate theory id in knowledge base " + id_);
        }
    }
    for (auto& r : rules_) {
        r.pattern = detail::ascii_lower(r.pattern);
    }
}

const Theory* KnowledgeBase::find_theory(std::string_view theory_id) const
{
    auto it = theories_.find(std::string(theory_id));
    return it == theories_.end() ? nullptr : &it->second;
}

const Theory& KnowledgeBase::theory(std::string_view theory_id) const
{
    if (const auto* t = find_theory(theory_id)) {
        return *t;
    }
    throw Error(Errc::not_found, fmt::format("theory '{}' not in knowledge base '{}'", theory_id, id_));
}

bool KnowledgeBase::has_proposition(std::string_view proposition) const
{
    return propositions_.contains(std::string(proposition));
}

bool KnowledgeBase::has_catch_all() const noexcept
{
    return std::any_of(rules_.begin(), rules_.end(),
                       [](const ResponderRule& r) { return r.pattern.empty(); });
}

const std::string& KnowledgeBase::respond(std::string_view text) const
{
    const std::string haystack = detail::ascii_lower(text);
    for (const auto& rule : rules_) {
        if (haystack.find(rule.pattern) != std::string::npos) {
            return rule.answer;
        }
    }
    throw Error(Errc::not_found, fmt::format("knowledge base '{}' has no catch-all rule", id_));
}

KnowledgeBase KnowledgeBase::with_theory(Theory extra) const
{
    std::vector<Theory> all;
    all.reserve(theories_.size() + 1);
    for (const auto& [_, t] : theories_) {
        all.push_back(t);
    }
    all.push_back(std::move(extra));
    return KnowledgeBase(id_, threshold_, std::move(all), rules_);
}

TruthValue evaluate(const KnowledgeBase& kb, std::string_view statement, const Theory& theory)
{
    if (!kb.has_proposition(statement)) {
        throw Error(Errc::not_found, fmt::format("unknown proposition '{}'", statement));
    }
    const std::string key(statement);
    if (theory.propositions.contains(key)) {
        return TruthValue::True;
    }
    if (theory.negations.contains(key)) {
        return TruthValue::False;
    }
    return TruthValue::Undetermined;
}

double cost_of_rejecting(const KnowledgeBase& kb, const Theory& theory)
{
    const Theory& registered = kb.theory(theory.id);
    check_unit(registered.cost, "theory cost");
    return registered.cost;
}

double rejection_cost(const TheorySet& candidate, const KnowledgeBase& kb)
{
    double total = 0.0;
    for (const auto& id : candidate) {
        total += kb.theory(id).cost;
    }
    return total;
}

TheorySet least_cost_explanation(std::string_view /*observation*/,
                                 const std::vector<TheorySet>& candidates,
                                 const KnowledgeBase& kb)
{
    if (candidates.empty()) {
        throw Error(Errc::invalid_argument, "least_cost_explanation needs at least one candidate");
    }
    const TheorySet* best = nullptr;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& candidate : candidates) {
        const double cost = rejection_cost(candidate, kb);
        // std::set iterates sorted, so set comparison is the sorted-id-list order.
        if (best == nullptr || cost < best_cost || (cost == best_cost && candidate < *best)) {
            best = &candidate;
            best_cost = cost;
        }
    }
    return *best;
}

KnowledgeBase parse_knowledge_base(std::string_view json_text)
{
    const json doc = detail::parse_json(json_text, "knowledge base");
    return detail::with_parse_errors("knowledge base", [&] {
        std::vector<Theory> theories;
        for (const auto& t : doc.value("theories", json::array())) {
            Theory theory;
            theory.id = t.at("id").get<std::string>();
            theory.cost = t.at("cost").get<double>();
            theory.propositions = t.value("propositions", std::set<std::string>{});
            theory.negations = t.value("negations", std::set<std::string>{});
            theories.push_back(std::move(theory));
        }
        std::vector<ResponderRule> rules;
        for (const auto& r : doc.value("rules", json::array())) {
            rules.push_back({r.at("pattern").get<std::string>(), r.at("answer").get<std::string>()});
        }
        return KnowledgeBase(doc.at("id").get<std::string>(), doc.at("threshold").get<double>(),
                             std::move(theories), std::move(rules));
    });
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& path)
{
    return parse_knowledge_base(detail::read_file(path));
}

std::string to_json(const KnowledgeBase& kb)
{
    json theories = json::array();
    for (const auto& [id, t] : kb.theories()) {
        theories.push_back({{"id", id},
                            {"cost", t.cost},
                            {"propositions", t.propositions},
                            {"negations", t.negations}});
    }
    json rules = json::array();
    for (const auto& r : kb.rules()) {
        rules.push_back({{"pattern", r.pattern}, {"answer", r.answer}});
    }
    json doc = {{"id", kb.id()}, {"threshold", kb.threshold()}, {"theories", theories}, {"rules", rules}};
    return doc.dump(2);
}

}  // namespace aporia::knowledge
