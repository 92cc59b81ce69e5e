#pragma once

#include "aporia/distance.hpp"
#include "aporia/emotion.hpp"
#include "aporia/knowledge.hpp"
#include "aporia/protocol.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aporia::poet {

enum class Verdict { Human, Machine, Inconclusive };

std::string_view to_string(Verdict v) noexcept;   // "human", "machine", "inconclusive"
Verdict verdict_from_string(std::string_view name);

struct EmotionReport {
    std::string label;
    double pi = 0.0;

    bool operator==(const EmotionReport&) const = default;
};

// Registry and config used for the protocol run of each round.
struct RoundSetup {
    std::shared_ptr<const protocol::ProtocolRegistry> registry;
    protocol::AporiaConfig config;
};

// Token-similarity setup over an empty knowledge base, for agents that do
// not expose their own.
RoundSetup neutral_round_setup();

// The party under test. One instance serves one PoET session.
class Agent {
public:
    virtual ~Agent() = default;

    virtual std::string kind() const = 0;
    virtual bool covers(const std::set<std::string>& proposal) = 0;
    virtual std::string answer(const std::string& premise, const std::string& question) = 0;
    virtual EmotionReport report(const std::string& premise,
                                 const std::string& question,
                                 const std::string& answer,
                                 const std::string& reveal) = 0;
    virtual void next_round() {}
    virtual RoundSetup round_setup() const { return neutral_round_setup(); }
};

// Deterministic agent: answers with emotion::answer and reports the
// listener pipeline's emotion. Throws without a catch-all rule.
class ScriptedAgent final : public Agent {
public:
    ScriptedAgent(std::shared_ptr<const knowledge::KnowledgeBase> kb,
                  distance::DistanceSpec spec,
                  emotion::ToneLexicon lexicon,
                  emotion::EmotionTaxonomy taxonomy);

    std::string kind() const override { return "scripted"; }
    bool covers(const std::set<std::string>& proposal) override;
    std::string answer(const std::string& premise, const std::string& question) override;
    EmotionReport report(const std::string& premise,
                         const std::string& question,
                         const std::string& answer,
                         const std::string& reveal) override;
    RoundSetup round_setup() const override;

    const knowledge::KnowledgeBase& knowledge() const noexcept { return *kb_; }
    const emotion::EmotionTaxonomy& taxonomy() const noexcept { return taxonomy_; }

private:
    std::shared_ptr<const knowledge::KnowledgeBase> kb_;
    distance::DistanceSpec spec_;
    emotion::ToneLexicon lexicon_;
    emotion::EmotionTaxonomy taxonomy_;
};

std::unique_ptr<ScriptedAgent> scripted_agent(knowledge::KnowledgeBase kb,
                                              distance::DistanceSpec spec,
                                              emotion::ToneLexicon lexicon,
                                              emotion::EmotionTaxonomy taxonomy);

enum class PoetPhase { Negotiating, InRound, AwaitVerdict, Closed };
enum class RoundStep { Premise, Answer, Reveal, Emotion };

std::string_view to_string(PoetPhase p) noexcept;
std::string_view to_string(RoundStep s) noexcept;

struct SendPremise {
    std::string premise;
    std::string question;
    Timestamp ts;
};
// Without a timestamp the agent events are stamped by the clock passed to
// poet_step after the agent returns, or with the latest recorded time.
struct AgentAnswer {
    std::optional<Timestamp> ts;
};
struct SendReveal {
    std::string reveal;
    Timestamp ts;
};
struct AgentEmotion {
    std::optional<Timestamp> ts;
};
struct NextRound {
    Timestamp ts;
};
struct RequestVerdict {
    Verdict verdict = Verdict::Inconclusive;
    Timestamp ts;
};

using PoetEvent = std::variant<SendPremise, AgentAnswer, SendReveal, AgentEmotion, NextRound, RequestVerdict>;

using Clock = std::function<Timestamp()>;

class PoetSession {
public:
    const std::string& id() const noexcept { return id_; }
    const std::vector<std::string>& proposal() const noexcept { return proposal_; }
    const std::vector<std::string>& agreed_emotions() const noexcept { return agreed_; }
    PoetPhase phase() const noexcept { return phase_; }
    RoundStep step() const noexcept { return step_; }
    const std::vector<protocol::Transcript>& rounds() const noexcept { return rounds_; }
    const std::optional<protocol::Session>& current() const noexcept { return current_; }
    const std::vector<Timestamp>& next_times() const noexcept { return next_ts_; }
    std::optional<Verdict> verdict() const noexcept { return verdict_; }
    std::optional<Timestamp> verdict_time() const noexcept { return verdict_ts_; }
    Timestamp start_time() const noexcept { return start_; }
    bool closed() const noexcept { return phase_ == PoetPhase::Closed; }

private:
    friend PoetSession start_test(const std::vector<std::string>&, Agent&, std::string, Timestamp);
    friend PoetSession poet_step(const PoetSession&, const PoetEvent&, Agent&, const Clock&);

    PoetSession() = default;

    std::string id_;
    std::vector<std::string> proposal_;
    std::vector<std::string> agreed_;
    PoetPhase phase_ = PoetPhase::Negotiating;
    RoundStep step_ = RoundStep::Premise;
    std::shared_ptr<const RoundSetup> setup_;
    std::vector<protocol::Transcript> rounds_;
    std::optional<protocol::Session> current_;
    std::vector<Timestamp> next_ts_;
    std::optional<Verdict> verdict_;
    std::optional<Timestamp> verdict_ts_;
    Timestamp start_;
};

// Report recorded at the end of a completed round.
EmotionReport reported_emotion(const protocol::Transcript& round);

// One-shot negotiation. An agent that does not cover the proposal closes the
// session as Inconclusive; an empty or duplicated proposal throws.
PoetSession start_test(const std::vector<std::string>& proposal, Agent& agent, std::string id, Timestamp ts = {});

PoetSession poet_step(const PoetSession& session, const PoetEvent& event, Agent& agent, const Clock& clock = {});

// Frame log of the session (hello, agreed/inconclusive, then every round
// event with its timestamp) as NDJSON.
std::string export_ndjson(const PoetSession& session);

// Rebuilds a session from export_ndjson output by driving a fresh session
// with an agent that replays the recorded answers and reports.
PoetSession import_ndjson(std::string_view text);

// Same id, negotiation, phase, verdict, event timestamps and round messages.
// Protocol outcomes are not compared: they depend on the agent's private
// knowledge.
bool equivalent(const PoetSession& a, const PoetSession& b);

}  // namespace aporia::poet
