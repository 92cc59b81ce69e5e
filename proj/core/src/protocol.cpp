#include "aporia/protocol.hpp"

#include "aporia/error.hpp"

#include <fmt/format.h>

#include <charconv>

namespace aporia::protocol {

std::string_view to_string(ProtocolKind kind) noexcept
{
    return kind == ProtocolKind::Sigma ? "sigma" : "aporia";
}

std::string_view to_string(MessageKind kind) noexcept
{
    switch (kind) {
    case MessageKind::Setup: return "setup";
    case MessageKind::Challenge: return "challenge";
    case MessageKind::Response: return "response";
    case MessageKind::Premise: return "premise";
    case MessageKind::Answer: return "answer";
    case MessageKind::Reveal: return "reveal";
    case MessageKind::EmotionReport: return "emotion_report";
    case MessageKind::Verdict: return "verdict";
    case MessageKind::Abort: return "abort";
    }
    return "premise";
}

MessageKind message_kind_from_string(std::string_view name)
{
    for (auto kind : {MessageKind::Setup, MessageKind::Challenge, MessageKind::Response,
                      MessageKind::Premise, MessageKind::Answer, MessageKind::Reveal,
                      MessageKind::EmotionReport, MessageKind::Verdict, MessageKind::Abort}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw Error(Errc::parse_error, fmt::format("unknown message kind '{}'", name));
}

std::string_view to_string(Phase phase) noexcept
{
    switch (phase) {
    case Phase::AwaitSetup: return "AwaitSetup";
    case Phase::AwaitChallenge: return "AwaitChallenge";
    case Phase::AwaitResponse: return "AwaitResponse";
    case Phase::AwaitPremise: return "AwaitPremise";
    case Phase::AwaitAnswer: return "AwaitAnswer";
    case Phase::AwaitReveal: return "AwaitReveal";
    case Phase::Complete: return "Complete";
    case Phase::Reported: return "Reported";
    case Phase::Aborted: return "Aborted";
    }
    return "AwaitPremise";
}

ProtocolMessage make_message(MessageKind kind, Payload payload, Timestamp ts)
{
    ProtocolMessage msg;
    msg.kind = kind;
    msg.payload = std::move(payload);
    msg.timestamp = ts;
    return msg;
}

ProtocolMessage make_premise(std::string premise, std::optional<std::string> question, Timestamp ts)
{
    ProtocolMessage msg = make_message(MessageKind::Premise, std::move(premise), ts);
    msg.question = std::move(question);
    return msg;
}

Roles roles_for(ProtocolKind kind)
{
    if (kind == ProtocolKind::Sigma) {
        return {"Prover", "Verifier"};
    }
    return {"Teller", "Listener"};
}

ProtocolRegistry& ProtocolRegistry::add_knowledge(std::shared_ptr<const knowledge::KnowledgeBase> kb)
{
    if (!kb) {
        throw Error(Errc::invalid_argument, "null knowledge base");
    }
    const std::string id = kb->id();
    knowledge_[id] = std::move(kb);
    return *this;
}

ProtocolRegistry& ProtocolRegistry::add_knowledge(knowledge::KnowledgeBase kb)
{
    return add_knowledge(std::make_shared<const knowledge::KnowledgeBase>(std::move(kb)));
}

ProtocolRegistry& ProtocolRegistry::add_distance(std::string name, distance::DistanceSpec spec)
{
    distance::validate(spec);
    distances_[std::move(name)] = std::move(spec);
    return *this;
}

ProtocolRegistry& ProtocolRegistry::add_responder(std::string kb_id, Responder responder)
{
    if (!responder) {
        throw Error(Errc::invalid_argument, "null responder");
    }
    responders_[std::move(kb_id)] = std::move(responder);
    return *this;
}

std::shared_ptr<const knowledge::KnowledgeBase> ProtocolRegistry::find_knowledge(std::string_view id) const
{
    auto it = knowledge_.find(id);
    return it == knowledge_.end() ? nullptr : it->second;
}

const distance::DistanceSpec* ProtocolRegistry::find_distance(std::string_view name) const
{
    auto it = distances_.find(name);
    return it == distances_.end() ? nullptr : &it->second;
}

const Responder* ProtocolRegistry::find_responder(std::string_view kb_id) const
{
    auto it = responders_.find(kb_id);
    return it == responders_.end() ? nullptr : &it->second;
}

bool Session::finished() const noexcept
{
    return phase_ == Phase::Complete || phase_ == Phase::Reported || phase_ == Phase::Aborted;
}

const AporiaConfig* Session::aporia_config() const noexcept
{
    return config_ ? std::get_if<AporiaConfig>(config_.get()) : nullptr;
}

const SigmaInstance* Session::sigma_instance() const noexcept
{
    return config_ ? std::get_if<SigmaInstance>(config_.get()) : nullptr;
}

const distance::DistanceSpec* Session::distance_spec() const noexcept
{
    return spec_ ? &*spec_ : nullptr;
}

Session new_session(ProtocolKind kind,
                    SessionConfig config,
                    std::shared_ptr<const ProtocolRegistry> registry,
                    std::string session_id)
{
    Session s;
    s.transcript_.session_id = std::move(session_id);
    s.transcript_.protocol_kind = kind;
    s.transcript_.roles = roles_for(kind);

    if (kind == ProtocolKind::Sigma) {
        const auto* sigma = std::get_if<SigmaInstance>(&config);
        if (sigma == nullptr) {
            throw Error(Errc::invalid_argument, "sigma session needs a SigmaInstance config");
        }
        if (!sigma->decision) {
            throw Error(Errc::invalid_argument, "sigma instance has no decision function");
        }
        s.phase_ = Phase::AwaitSetup;
    } else {
        const auto* aporia = std::get_if<AporiaConfig>(&config);
        if (aporia == nullptr) {
            throw Error(Errc::invalid_argument, "aporia session needs an AporiaConfig");
        }
        if (!registry) {
            throw Error(Errc::invalid_argument, "aporia session needs a registry");
        }
        const auto* spec = registry->find_distance(aporia->distance);
        if (spec == nullptr) {
            throw Error(Errc::not_found, fmt::format("distance '{}' is not registered", aporia->distance));
        }
        s.kb_ = registry->find_knowledge(aporia->knowledge);
        if (!s.kb_) {
            throw Error(Errc::not_found, fmt::format("knowledge base '{}' is not registered", aporia->knowledge));
        }
        if (spec->kind == distance::DistanceKind::TheoryCost && s.kb_->find_theory(spec->theory_id) == nullptr) {
            throw Error(Errc::not_found, fmt::format("distance '{}' names theory '{}' absent from '{}'",
                                                     aporia->distance, spec->theory_id, aporia->knowledge));
        }
        s.spec_ = *spec;
        s.phase_ = Phase::AwaitPremise;
    }
    s.registry_ = std::move(registry);
    s.config_ = std::make_shared<const SessionConfig>(std::move(config));
    return s;
}

namespace {

[[noreturn]] void out_of_order(const Session& s, MessageKind kind)
{
    throw Error(Errc::out_of_order,
                fmt::format("{} not legal in phase {}", to_string(kind), to_string(s.phase())));
}

const ProtocolMessage* find_last(const Transcript& t, MessageKind kind)
{
    for (auto it = t.messages.rbegin(); it != t.messages.rend(); ++it) {
        if (it->kind == kind) {
            return &*it;
        }
    }
    return nullptr;
}

void check_answer_type(const distance::DistanceSpec& spec, const Payload& payload, MessageKind kind)
{
    const bool ok = spec.numeric() ? is_number(payload) : is_text(payload);
    if (!ok) {
        throw Error(Errc::type_mismatch,
                    fmt::format("{} payload must be {} for distance {}", to_string(kind),
                                spec.numeric() ? "numeric" : "text", distance::to_string(spec.kind)));
    }
}

Payload coerce_answer(const distance::DistanceSpec& spec, std::string text)
{
    if (!spec.numeric()) {
        return text;
    }
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(Errc::type_mismatch, fmt::format("responder answer '{}' is not numeric", text));
    }
    return value;
}

}  // namespace

ProtocolMessage resolve_implicit(const Session& session, const knowledge::KnowledgeBase& kb)
{
    const auto* cfg = session.aporia_config();
    if (cfg == nullptr || session.phase() != Phase::AwaitAnswer) {
        throw Error(Errc::not_allowed,
                    fmt::format("nothing implicit to resolve in phase {}", to_string(session.phase())));
    }
    if (!cfg->implicit_r_allowed) {
        throw Error(Errc::not_allowed, "implicit answers are not allowed by this session");
    }
    const Responder* responder = session.registry_->find_responder(kb.id());
    if (responder == nullptr) {
        throw Error(Errc::not_found, fmt::format("no responder registered for '{}'", kb.id()));
    }
    const auto* premise = find_last(session.transcript(), MessageKind::Premise);
    const std::string& p = std::get<std::string>(premise->payload);
    const std::string q = premise->question.value_or("");

    ProtocolMessage msg = make_message(MessageKind::Answer, coerce_answer(*session.spec_, (*responder)(p, q, kb)),
                                       premise->timestamp);
    msg.implicit = true;
    return msg;
}

Session step(const Session& session, const ProtocolMessage& msg)
{
    const auto& messages = session.transcript_.messages;
    if (!messages.empty() && msg.timestamp < messages.back().timestamp) {
        throw Error(Errc::timestamp_regression,
                    fmt::format("timestamp {} ms precedes {} ms", msg.timestamp.millis(),
                                messages.back().timestamp.millis()));
    }
    if (!msg.implicit) {
        if (const auto* text = std::get_if<std::string>(&msg.payload); text != nullptr && text->empty()) {
            throw Error(Errc::invalid_argument, fmt::format("{} payload must not be empty", to_string(msg.kind)));
        }
    }

    Session next = session;
    auto& out = next.transcript_;

    if (session.kind() == ProtocolKind::Sigma) {
        if (msg.implicit) {
            throw Error(Errc::not_allowed, "sigma protocols carry no implicit messages");
        }
        const MessageKind expected = session.phase_ == Phase::AwaitSetup       ? MessageKind::Setup
                                     : session.phase_ == Phase::AwaitChallenge ? MessageKind::Challenge
                                     : session.phase_ == Phase::AwaitResponse  ? MessageKind::Response
                                                                               : MessageKind::Verdict;
        if (msg.kind != expected || expected == MessageKind::Verdict) {
            out_of_order(session, msg.kind);
        }
        out.messages.push_back(msg);
        switch (session.phase_) {
        case Phase::AwaitSetup: next.phase_ = Phase::AwaitChallenge; break;
        case Phase::AwaitChallenge: next.phase_ = Phase::AwaitResponse; break;
        default: {
            const auto* sigma = session.sigma_instance();
            const bool accepted = sigma->decision(sigma->common_input, out.messages[0].payload,
                                                  out.messages[1].payload, out.messages[2].payload);
            out.outcome = accepted ? SigmaDecision::Accept : SigmaDecision::Reject;
            next.phase_ = Phase::Complete;
            break;
        }
        }
        return next;
    }

    const AporiaConfig& cfg = *session.aporia_config();
    const distance::DistanceSpec& spec = *session.spec_;

    switch (session.phase_) {
    case Phase::AwaitPremise: {
        if (msg.kind != MessageKind::Premise) {
            out_of_order(session, msg.kind);
        }
        if (!is_text(msg.payload)) {
            throw Error(Errc::type_mismatch, "premise payload must be text");
        }
        ProtocolMessage premise = msg;
        if (premise.question_implicit && !cfg.implicit_q_allowed) {
            throw Error(Errc::not_allowed, "implicit questions are not allowed by this session");
        }
        if (!premise.question || premise.question->empty()) {
            if (!cfg.implicit_q_allowed) {
                throw Error(Errc::not_allowed, "premise needs an explicit question");
            }
            premise.question = std::string(implicit_question_text);
            premise.question_implicit = true;
        }
        out.messages.push_back(std::move(premise));
        next.phase_ = Phase::AwaitAnswer;
        return next;
    }
    case Phase::AwaitAnswer: {
        if (msg.kind == MessageKind::Abort) {
            out.messages.push_back(msg);
            next.phase_ = Phase::Aborted;
            return next;
        }
        if (msg.kind == MessageKind::Reveal && cfg.implicit_r_allowed) {
            // Materialize the unstated answer so the transcript holds P, Q, R and R'.
            next = step(session, resolve_implicit(session, *session.kb_));
            return step(next, msg);
        }
        if (msg.kind != MessageKind::Answer) {
            out_of_order(session, msg.kind);
        }
        if (msg.implicit && !cfg.implicit_r_allowed) {
            throw Error(Errc::not_allowed, "implicit answers are not allowed by this session");
        }
        check_answer_type(spec, msg.payload, msg.kind);
        out.messages.push_back(msg);
        next.phase_ = Phase::AwaitReveal;
        return next;
    }
    case Phase::AwaitReveal: {
        if (msg.kind == MessageKind::Abort) {
            out.messages.push_back(msg);
            next.phase_ = Phase::Aborted;
            return next;
        }
        if (msg.kind != MessageKind::Reveal) {
            out_of_order(session, msg.kind);
        }
        if (msg.implicit) {
            throw Error(Errc::not_allowed, "the reveal is always transmitted");
        }
        check_answer_type(spec, msg.payload, msg.kind);
        const auto* premise = find_last(out, MessageKind::Premise);
        const auto* answer = find_last(out, MessageKind::Answer);
        distance::AporiaInputs inputs{std::get<std::string>(premise->payload), premise->question,
                                      answer->payload, msg.payload};
        out.messages.push_back(msg);
        out.outcome = distance::compute_aporia(*session.kb_, inputs, spec);
        next.phase_ = Phase::Complete;
        return next;
    }
    case Phase::Complete: {
        if (msg.kind != MessageKind::EmotionReport) {
            out_of_order(session, msg.kind);
        }
        if (!is_text(msg.payload)) {
            throw Error(Errc::type_mismatch, "emotion report payload must be a label");
        }
        out.messages.push_back(msg);
        next.phase_ = Phase::Reported;
        return next;
    }
    default:
        out_of_order(session, msg.kind);
    }
}

const Transcript& transcript(const Session& session)
{
    return session.transcript();
}

Session replay(const Session& fresh, const Transcript& recorded)
{
    Session s = fresh;
    for (const auto& msg : recorded.messages) {
        s = step(s, msg);
    }
    return s;
}

}  // namespace aporia::protocol
