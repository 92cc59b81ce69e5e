#include "aporia/poet.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

namespace aporia::poet {

using nlohmann::json;
using protocol::MessageKind;

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Human: return "human";
    case Verdict::Machine: return "machine";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(std::string_view name)
{
    if (name == "human") return Verdict::Human;
    if (name == "machine") return Verdict::Machine;
    if (name == "inconclusive") return Verdict::Inconclusive;
    throw Error(Errc::invalid_argument, fmt::format("unknown verdict '{}'", name));
}

std::string_view to_string(PoetPhase p) noexcept
{
    switch (p) {
    case PoetPhase::Negotiating: return "Negotiating";
    case PoetPhase::InRound: return "InRound";
    case PoetPhase::AwaitVerdict: return "AwaitVerdict";
    case PoetPhase::Closed: return "Closed";
    }
    return "Closed";
}

std::string_view to_string(RoundStep s) noexcept
{
    switch (s) {
    case RoundStep::Premise: return "premise";
    case RoundStep::Answer: return "answer";
    case RoundStep::Reveal: return "reveal";
    case RoundStep::Emotion: return "emotion";
    }
    return "premise";
}

RoundSetup neutral_round_setup()
{
    static const auto registry = [] {
        auto r = std::make_shared<protocol::ProtocolRegistry>();
        r->add_knowledge(knowledge::KnowledgeBase("poet-neutral", 1.0, {}, {}));
        r->add_distance("token_similarity", {distance::DistanceKind::TokenSimilarity, "", "default"});
        return r;
    }();
    return {registry, {"poet-neutral", "token_similarity", false, false}};
}

ScriptedAgent::ScriptedAgent(std::shared_ptr<const knowledge::KnowledgeBase> kb,
                             distance::DistanceSpec spec,
                             emotion::ToneLexicon lexicon,
                             emotion::EmotionTaxonomy taxonomy)
    : kb_(std::move(kb)), spec_(std::move(spec)), lexicon_(std::move(lexicon)), taxonomy_(std::move(taxonomy))
{
    if (!kb_) {
        throw Error(Errc::invalid_argument, "scripted agent needs a knowledge base");
    }
    if (!kb_->has_catch_all()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("knowledge base '{}' has no catch-all rule; the agent could not always answer",
                                kb_->id()));
    }
    distance::validate(spec_);
    if (!spec_.normalized() || spec_.numeric()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("scripted agents need a normalized text distance, not {}",
                                distance::to_string(spec_.kind)));
    }
    if (spec_.kind == distance::DistanceKind::TheoryCost) {
        kb_->theory(spec_.theory_id);
    }
}

bool ScriptedAgent::covers(const std::set<std::string>& proposal)
{
    return std::all_of(proposal.begin(), proposal.end(),
                       [&](const std::string& label) { return taxonomy_.contains(label); });
}

std::string ScriptedAgent::answer(const std::string& premise, const std::string& question)
{
    return emotion::answer(premise, question, *kb_);
}

EmotionReport ScriptedAgent::report(const std::string& premise,
                                    const std::string& question,
                                    const std::string&,
                                    const std::string& reveal)
{
    const auto result = emotion::run_listener_pipeline(premise, question, reveal, *kb_, spec_, lexicon_, taxonomy_);
    return {result.emotion, result.pi};
}

RoundSetup ScriptedAgent::round_setup() const
{
    auto registry = std::make_shared<protocol::ProtocolRegistry>();
    registry->add_knowledge(kb_);
    registry->add_distance("agent", spec_);
    registry->add_responder(kb_->id(), [](std::string_view p, std::string_view q, const knowledge::KnowledgeBase& kb) {
        return emotion::answer(p, q, kb);
    });
    return {registry, {kb_->id(), "agent", false, false}};
}

std::unique_ptr<ScriptedAgent> scripted_agent(knowledge::KnowledgeBase kb,
                                              distance::DistanceSpec spec,
                                              emotion::ToneLexicon lexicon,
                                              emotion::EmotionTaxonomy taxonomy)
{
    return std::make_unique<ScriptedAgent>(std::make_shared<const knowledge::KnowledgeBase>(std::move(kb)),
                                           std::move(spec), std::move(lexicon), std::move(taxonomy));
}

EmotionReport reported_emotion(const protocol::Transcript& round)
{
    if (round.messages.empty() || round.messages.back().kind != MessageKind::EmotionReport) {
        throw Error(Errc::not_found, fmt::format("round '{}' has no emotion report", round.session_id));
    }
    const auto& msg = round.messages.back();
    return {std::get<std::string>(msg.payload), msg.reported_pi.value_or(0.0)};
}

PoetSession start_test(const std::vector<std::string>& proposal, Agent& agent, std::string id, Timestamp ts)
{
    const std::set<std::string> unique(proposal.begin(), proposal.end());
    if (proposal.empty()) {
        throw Error(Errc::invalid_argument, "the emotion proposal must not be empty");
    }
    if (unique.size() != proposal.size() || unique.contains("")) {
        throw Error(Errc::invalid_argument, "the emotion proposal must list distinct, non-empty labels");
    }
    PoetSession s;
    s.id_ = std::move(id);
    s.proposal_ = proposal;
    s.start_ = ts;
    if (agent.covers(unique)) {
        s.agreed_ = proposal;
        s.setup_ = std::make_shared<const RoundSetup>(agent.round_setup());
        s.phase_ = PoetPhase::InRound;
        s.step_ = RoundStep::Premise;
    } else {
        s.phase_ = PoetPhase::Closed;
        s.verdict_ = Verdict::Inconclusive;
        s.verdict_ts_ = ts;
    }
    return s;
}

namespace {

std::string_view event_name(const PoetEvent& ev)
{
    static constexpr std::string_view names[] = {"premise", "answer", "reveal", "emotion", "next", "verdict"};
    return names[ev.index()];
}

[[noreturn]] void reject(const PoetSession& s, const PoetEvent& ev)
{
    const std::string where = s.phase() == PoetPhase::InRound
                                  ? fmt::format("{}({})", to_string(s.phase()), to_string(s.step()))
                                  : std::string(to_string(s.phase()));
    throw Error(Errc::out_of_order, fmt::format("event '{}' is not legal in phase {}", event_name(ev), where));
}

const protocol::ProtocolMessage& last_of(const protocol::Transcript& t, MessageKind kind)
{
    for (auto it = t.messages.rbegin(); it != t.messages.rend(); ++it) {
        if (it->kind == kind) {
            return *it;
        }
    }
    throw Error(Errc::not_found, fmt::format("no {} message in round", protocol::to_string(kind)));
}

Timestamp agent_time(const std::optional<Timestamp>& given, const Clock& clock, const protocol::Session& current)
{
    if (given) {
        return *given;
    }
    if (clock) {
        return clock();
    }
    return current.transcript().messages.back().timestamp;
}

// Latest time recorded outside the open round.
Timestamp settled_time(const PoetSession& s)
{
    Timestamp t = s.start_time();
    if (!s.next_times().empty()) {
        t = std::max(t, s.next_times().back());
    }
    if (!s.rounds().empty()) {
        t = std::max(t, s.rounds().back().messages.back().timestamp);
    }
    return t;
}

void require_not_before(const PoetSession& s, Timestamp ts, std::string_view what)
{
    if (ts < settled_time(s)) {
        throw Error(Errc::timestamp_regression, fmt::format("{} precedes the session's last event", what));
    }
}

}  // namespace

PoetSession poet_step(const PoetSession& session, const PoetEvent& event, Agent& agent, const Clock& clock)
{
    const bool in_round = session.phase_ == PoetPhase::InRound;
    auto require_step = [&](RoundStep step) {
        if (!in_round || session.step_ != step) {
            reject(session, event);
        }
    };

    PoetSession next = session;
    std::visit(
        [&](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, SendPremise>) {
                require_step(RoundStep::Premise);
                if (ev.question.empty()) {
                    throw Error(Errc::not_allowed, "the premise needs an explicit question");
                }
                require_not_before(session, ev.ts, "premise");
                auto round = protocol::new_session(protocol::ProtocolKind::Aporia, session.setup_->config,
                                                   session.setup_->registry,
                                                   fmt::format("{}/{}", session.id_, session.rounds_.size() + 1));
                next.current_ = protocol::step(round, protocol::make_premise(ev.premise, ev.question, ev.ts));
                next.step_ = RoundStep::Answer;
            } else if constexpr (std::is_same_v<T, AgentAnswer>) {
                require_step(RoundStep::Answer);
                const auto& t = session.current_->transcript();
                const auto& premise = last_of(t, MessageKind::Premise);
                std::string r = agent.answer(std::get<std::string>(premise.payload), premise.question.value_or(""));
                const Timestamp ts = agent_time(ev.ts, clock, *session.current_);
                next.current_ =
                    protocol::step(*session.current_, protocol::make_message(MessageKind::Answer, std::move(r), ts));
                next.step_ = RoundStep::Reveal;
            } else if constexpr (std::is_same_v<T, SendReveal>) {
                require_step(RoundStep::Reveal);
                next.current_ =
                    protocol::step(*session.current_, protocol::make_message(MessageKind::Reveal, ev.reveal, ev.ts));
                next.step_ = RoundStep::Emotion;
            } else if constexpr (std::is_same_v<T, AgentEmotion>) {
                require_step(RoundStep::Emotion);
                const auto& t = session.current_->transcript();
                const auto& premise = last_of(t, MessageKind::Premise);
                const auto report = agent.report(std::get<std::string>(premise.payload),
                                                 premise.question.value_or(""),
                                                 std::get<std::string>(last_of(t, MessageKind::Answer).payload),
                                                 std::get<std::string>(last_of(t, MessageKind::Reveal).payload));
                if (std::find(session.agreed_.begin(), session.agreed_.end(), report.label) == session.agreed_.end()) {
                    throw Error(Errc::not_allowed,
                                fmt::format("reported emotion '{}' is outside the agreed set", report.label));
                }
                if (!(report.pi >= 0.0 && report.pi <= 1.0)) {
                    throw Error(Errc::invalid_argument, fmt::format("reported pi {} outside [0,1]", report.pi));
                }
                auto msg = protocol::make_message(MessageKind::EmotionReport, report.label,
                                                  agent_time(ev.ts, clock, *session.current_));
                msg.reported_pi = report.pi;
                auto done = protocol::step(*session.current_, msg);
                next.rounds_.push_back(done.transcript());
                next.current_.reset();
                next.phase_ = PoetPhase::AwaitVerdict;
            } else if constexpr (std::is_same_v<T, NextRound>) {
                if (session.phase_ != PoetPhase::AwaitVerdict) {
                    reject(session, event);
                }
                const Timestamp last = session.rounds_.back().messages.back().timestamp;
                if (ev.ts < last) {
                    throw Error(Errc::timestamp_regression, "next round precedes the last report");
                }
                agent.next_round();
                next.next_ts_.push_back(ev.ts);
                next.phase_ = PoetPhase::InRound;
                next.step_ = RoundStep::Premise;
            } else {
                if (session.phase_ != PoetPhase::AwaitVerdict) {
                    reject(session, event);
                }
                require_not_before(session, ev.ts, "verdict");
                next.verdict_ = ev.verdict;
                next.verdict_ts_ = ev.ts;
                next.phase_ = PoetPhase::Closed;
            }
        },
        event);
    return next;
}

namespace {

void append_round_frames(std::string& out, const protocol::Transcript& t)
{
    for (const auto& m : t.messages) {
        json frame;
        switch (m.kind) {
        case MessageKind::Premise:
            frame = {{"t", "premise"}, {"p", std::get<std::string>(m.payload)}, {"q", m.question.value_or("")}};
            break;
        case MessageKind::Answer: frame = {{"t", "answer"}, {"r", std::get<std::string>(m.payload)}}; break;
        case MessageKind::Reveal: frame = {{"t", "reveal"}, {"rp", std::get<std::string>(m.payload)}}; break;
        case MessageKind::EmotionReport:
            frame = {{"t", "emotion"}, {"e", std::get<std::string>(m.payload)}, {"pi", m.reported_pi.value_or(0.0)}};
            break;
        default: continue;
        }
        frame["ts"] = m.timestamp.millis();
        out += frame.dump();
        out += '\n';
    }
}

class ReplayAgent final : public Agent {
public:
    explicit ReplayAgent(bool agreed) : agreed_(agreed) {}

    std::string kind() const override { return "replay"; }
    bool covers(const std::set<std::string>&) override { return agreed_; }
    std::string answer(const std::string&, const std::string&) override { return answer_; }
    EmotionReport report(const std::string&, const std::string&, const std::string&, const std::string&) override
    {
        return report_;
    }

    std::string answer_;
    EmotionReport report_;

private:
    bool agreed_;
};

}  // namespace

std::string export_ndjson(const PoetSession& s)
{
    std::string out;
    out += json{{"t", "hello"}, {"session", s.id()}, {"emotions", s.proposal()}, {"ts", s.start_time().millis()}}
               .dump();
    out += '\n';
    const bool agreed = !s.agreed_emotions().empty();
    json reply{{"t", agreed ? "agreed" : "inconclusive"}, {"session", s.id()}};
    if (agreed) {
        reply["emotions"] = s.agreed_emotions();
    }
    out += reply.dump();
    out += '\n';
    for (std::size_t i = 0; i < s.rounds().size(); ++i) {
        append_round_frames(out, s.rounds()[i]);
        if (i < s.next_times().size()) {
            out += json{{"t", "next"}, {"ts", s.next_times()[i].millis()}}.dump();
            out += '\n';
        }
    }
    if (s.current()) {
        append_round_frames(out, s.current()->transcript());
    }
    if (agreed && s.verdict()) {
        out += json{{"t", "verdict"}, {"v", to_string(*s.verdict())}, {"ts", s.verdict_time()->millis()}}.dump();
        out += '\n';
    }
    return out;
}

PoetSession import_ndjson(std::string_view text)
{
    std::vector<json> frames;
    {
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                frames.push_back(detail::parse_json(line, "poet export"));
            }
        }
    }
    return detail::with_parse_errors("poet export", [&] {
        if (frames.size() < 2 || frames[0].at("t") != "hello") {
            throw Error(Errc::parse_error, "poet export must start with hello and its reply");
        }
        const auto& reply = frames[1].at("t").get<std::string>();
        if (reply != "agreed" && reply != "inconclusive") {
            throw Error(Errc::parse_error, fmt::format("unexpected negotiation reply '{}'", reply));
        }
        ReplayAgent agent(reply == "agreed");
        auto session = start_test(frames[0].at("emotions").get<std::vector<std::string>>(), agent,
                                  frames[0].at("session").get<std::string>(),
                                  Timestamp(frames[0].at("ts").get<std::int64_t>()));
        for (std::size_t i = 2; i < frames.size(); ++i) {
            const auto& f = frames[i];
            const auto t = f.at("t").get<std::string>();
            const Timestamp ts(f.at("ts").get<std::int64_t>());
            PoetEvent ev;
            if (t == "premise") {
                ev = SendPremise{f.at("p").get<std::string>(), f.at("q").get<std::string>(), ts};
            } else if (t == "answer") {
                agent.answer_ = f.at("r").get<std::string>();
                ev = AgentAnswer{ts};
            } else if (t == "reveal") {
                ev = SendReveal{f.at("rp").get<std::string>(), ts};
            } else if (t == "emotion") {
                agent.report_ = {f.at("e").get<std::string>(), f.at("pi").get<double>()};
                ev = AgentEmotion{ts};
            } else if (t == "next") {
                ev = NextRound{ts};
            } else if (t == "verdict") {
                ev = RequestVerdict{verdict_from_string(f.at("v").get<std::string>()), ts};
            } else {
                throw Error(Errc::parse_error, fmt::format("unexpected frame '{}' in poet export", t));
            }
            session = poet_step(session, ev, agent);
        }
        return session;
    });
}

bool equivalent(const PoetSession& a, const PoetSession& b)
{
    auto same_messages = [](const protocol::Transcript& x, const protocol::Transcript& y) {
        return x.session_id == y.session_id && x.messages == y.messages;
    };
    if (a.id() != b.id() || a.proposal() != b.proposal() || a.agreed_emotions() != b.agreed_emotions()
        || a.phase() != b.phase() || a.verdict() != b.verdict() || a.verdict_time() != b.verdict_time()
        || a.start_time() != b.start_time() || a.next_times() != b.next_times()
        || a.rounds().size() != b.rounds().size() || a.current().has_value() != b.current().has_value()) {
        return false;
    }
    if (a.phase() == PoetPhase::InRound && a.step() != b.step()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rounds().size(); ++i) {
        if (!same_messages(a.rounds()[i], b.rounds()[i])) {
            return false;
        }
    }
    return !a.current() || same_messages(a.current()->transcript(), b.current()->transcript());
}

}  // namespace aporia::poet
