#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::knowledge {

enum class TruthValue { True, False, Undetermined };

std::string_view to_string(TruthValue value) noexcept;

// A labelled belief bundle. `propositions` are held true, `negations` are
// proposition ids the theory holds false. Cost is the price of abandoning it.
struct Theory {
    std::string id;
    std::set<std::string> propositions;
    std::set<std::string> negations;
    double cost = 0.0;

    bool operator==(const Theory&) const = default;
};

// Case-insensitive substring pattern; an empty pattern matches everything.
struct ResponderRule {
    std::string pattern;
    std::string answer;

    bool operator==(const ResponderRule&) const = default;
};

using TheorySet = std::set<std::string>;

// Common knowledge shared by the two parties of a protocol run. Immutable
// once constructed; safe for concurrent reads.
class KnowledgeBase {
public:
    KnowledgeBase(std::string id,
                  double threshold,
                  std::vector<Theory> theories,
                  std::vector<ResponderRule> rules);

    const std::string& id() const noexcept { return id_; }
    double threshold() const noexcept { return threshold_; }
    const std::map<std::string, Theory>& theories() const noexcept { return theories_; }
    const std::vector<ResponderRule>& rules() const noexcept { return rules_; }

    const Theory* find_theory(std::string_view theory_id) const;
    const Theory& theory(std::string_view theory_id) const;

    // A proposition is registered once any theory mentions it either way.
    bool has_proposition(std::string_view proposition) const;
    bool has_catch_all() const noexcept;

    // First rule whose pattern occurs in `text`, ignoring case.
    const std::string& respond(std::string_view text) const;

    KnowledgeBase with_theory(Theory extra) const;

    bool operator==(const KnowledgeBase&) const = default;

private:
    std::string id_;
    double threshold_;
    std::map<std::string, Theory> theories_;
    std::vector<ResponderRule> rules_;
    std::set<std::string> propositions_;
};

TruthValue evaluate(const KnowledgeBase& kb, std::string_view statement, const Theory& theory);

double cost_of_rejecting(const KnowledgeBase& kb, const Theory& theory);

// Returns the candidate with the smallest summed rejection cost. Ties go to
// the lexicographically smallest sorted id list.
TheorySet least_cost_explanation(std::string_view observation,
                                 const std::vector<TheorySet>& candidates,
                                 const KnowledgeBase& kb);

double rejection_cost(const TheorySet& candidate, const KnowledgeBase& kb);

KnowledgeBase parse_knowledge_base(std::string_view json_text);
KnowledgeBase load_knowledge_base(const std::filesystem::path& path);
std::string to_json(const KnowledgeBase& kb);

}  // namespace aporia::knowledge
