#pragma once

#include "aporia/distance.hpp"
#include "aporia/knowledge.hpp"
#include "aporia/payload.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aporia::protocol {

enum class ProtocolKind { Sigma, Aporia };

enum class MessageKind {
    Setup,          // a
    Challenge,      // e
    Response,       // z
    Premise,        // P with optional Q
    Answer,         // R
    Reveal,         // R'
    EmotionReport,  // label reported after an aporia run
    Verdict,
    Abort,          // Teller gives up after seeing R
};

std::string_view to_string(ProtocolKind kind) noexcept;
std::string_view to_string(MessageKind kind) noexcept;
MessageKind message_kind_from_string(std::string_view name);

struct ProtocolMessage {
    MessageKind kind = MessageKind::Premise;
    Payload payload;
    std::optional<std::string> question;   // Q, premises only
    bool question_implicit = false;
    std::optional<double> reported_pi;     // emotion reports only
    Timestamp timestamp;
    bool implicit = false;

    bool operator==(const ProtocolMessage&) const = default;
};

ProtocolMessage make_message(MessageKind kind, Payload payload, Timestamp ts);
ProtocolMessage make_premise(std::string premise, std::optional<std::string> question, Timestamp ts);

enum class SigmaDecision { Accept, Reject };

using Outcome = std::variant<SigmaDecision, distance::AporiaResult>;

struct Roles {
    std::string initiator;  // Prover or Teller
    std::string responder;  // Verifier or Listener

    bool operator==(const Roles&) const = default;
};

Roles roles_for(ProtocolKind kind);

struct Transcript {
    std::string session_id;
    ProtocolKind protocol_kind = ProtocolKind::Aporia;
    Roles roles;
    std::vector<ProtocolMessage> messages;
    std::optional<Outcome> outcome;

    bool operator==(const Transcript&) const = default;
};

// x, the relation between x and the witness, and the verifier's decision D.
struct SigmaInstance {
    Payload common_input;
    std::function<bool(const Payload& x, const Payload& w)> relation_check;
    std::function<bool(const Payload& x, const Payload& a, const Payload& e, const Payload& z)> decision;
};

struct AporiaConfig {
    std::string knowledge;   // knowledge base id
    std::string distance;    // registered distance name
    bool implicit_q_allowed = false;
    bool implicit_r_allowed = false;
};

using SessionConfig = std::variant<SigmaInstance, AporiaConfig>;

// Produces the Listener's answer R from (P, Q) under a knowledge base.
using Responder = std::function<std::string(std::string_view premise,
                                            std::string_view question,
                                            const knowledge::KnowledgeBase& kb)>;

// Lookup tables the engine resolves configs against. Build it once, then
// share it as a const pointer.
class ProtocolRegistry {
public:
    ProtocolRegistry& add_knowledge(std::shared_ptr<const knowledge::KnowledgeBase> kb);
    ProtocolRegistry& add_knowledge(knowledge::KnowledgeBase kb);
    ProtocolRegistry& add_distance(std::string name, distance::DistanceSpec spec);
    ProtocolRegistry& add_responder(std::string kb_id, Responder responder);

    std::shared_ptr<const knowledge::KnowledgeBase> find_knowledge(std::string_view id) const;
    const distance::DistanceSpec* find_distance(std::string_view name) const;
    const Responder* find_responder(std::string_view kb_id) const;

private:
    std::map<std::string, std::shared_ptr<const knowledge::KnowledgeBase>, std::less<>> knowledge_;
    std::map<std::string, distance::DistanceSpec, std::less<>> distances_;
    std::map<std::string, Responder, std::less<>> responders_;
};

enum class Phase {
    AwaitSetup,
    AwaitChallenge,
    AwaitResponse,
    AwaitPremise,
    AwaitAnswer,
    AwaitReveal,
    Complete,
    Reported,
    Aborted,
};

std::string_view to_string(Phase phase) noexcept;

// Question synthesized for a premise sent without Q when implicit Q is allowed.
inline constexpr std::string_view implicit_question_text = "what happens next?";

// Immutable state machine value: step() returns a new session and leaves
// the receiver untouched.
class Session {
public:
    Phase phase() const noexcept { return phase_; }
    ProtocolKind kind() const noexcept { return transcript_.protocol_kind; }
    const Transcript& transcript() const noexcept { return transcript_; }
    const std::string& id() const noexcept { return transcript_.session_id; }
    bool finished() const noexcept;

    const AporiaConfig* aporia_config() const noexcept;
    const SigmaInstance* sigma_instance() const noexcept;
    std::shared_ptr<const knowledge::KnowledgeBase> knowledge() const { return kb_; }
    const distance::DistanceSpec* distance_spec() const noexcept;

private:
    friend Session new_session(ProtocolKind, SessionConfig, std::shared_ptr<const ProtocolRegistry>, std::string);
    friend Session step(const Session&, const ProtocolMessage&);
    friend ProtocolMessage resolve_implicit(const Session&, const knowledge::KnowledgeBase&);

    Session() = default;

    std::shared_ptr<const ProtocolRegistry> registry_;
    std::shared_ptr<const SessionConfig> config_;
    std::shared_ptr<const knowledge::KnowledgeBase> kb_;
    std::optional<distance::DistanceSpec> spec_;
    Phase phase_ = Phase::AwaitPremise;
    Transcript transcript_;
};

Session new_session(ProtocolKind kind,
                    SessionConfig config,
                    std::shared_ptr<const ProtocolRegistry> registry = nullptr,
                    std::string session_id = "session");

Session step(const Session& session, const ProtocolMessage& msg);

// Synthesizes the Listener's implicit answer R with the responder registered
// for `kb`. The session is not modified; step the returned message to record it.
ProtocolMessage resolve_implicit(const Session& session, const knowledge::KnowledgeBase& kb);

const Transcript& transcript(const Session& session);

// Steps every recorded message into `fresh`.
Session replay(const Session& fresh, const Transcript& recorded);

}  // namespace aporia::protocol
