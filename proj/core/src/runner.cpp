#include "aporia/runner.hpp"

#include "aporia/error.hpp"
#include "aporia/sigma_bank.hpp"
#include "aporia/transcript_io.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <sstream>

namespace aporia::runner {

using nlohmann::json;
using protocol::MessageKind;

namespace {

Payload payload_from(const json& j, std::string_view what)
{
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_number()) {
        return j.get<double>();
    }
    throw Error(Errc::parse_error, fmt::format("fixture field '{}' must be text or a number", what));
}

}  // namespace

ProtocolFixture load_protocol_fixture(const std::filesystem::path& path)
{
    const auto file = std::filesystem::is_directory(path) ? path / "protocol.json" : path;
    const auto dir = file.parent_path();
    if (!std::filesystem::exists(file)) {
        throw Error(Errc::io_error, "no protocol fixture at " + path.string());
    }
    const json doc = detail::parse_json(detail::read_file(file), "protocol fixture");
    return detail::with_parse_errors("protocol fixture", [&]() -> ProtocolFixture {
        const auto kind = doc.at("kind").get<std::string>();
        const auto id = doc.value("id", dir.filename().string());
        if (kind == "sigma") {
            SigmaFixture f;
            f.id = id;
            f.balance = doc.at("balance").get<std::int64_t>();
            f.token = doc.at("token").get<std::string>();
            if (doc.contains("prover_token")) {
                f.prover_token = doc["prover_token"].get<std::string>();
            }
            f.challenge = doc.at("challenge").get<std::int64_t>();
            return f;
        }
        if (kind != "aporia") {
            throw Error(Errc::parse_error, fmt::format("unknown fixture kind '{}'", kind));
        }
        AporiaFixture f{id,
                        knowledge::load_knowledge_base(dir / doc.at("knowledge").get<std::string>()),
                        doc.at("premise").get<std::string>(),
                        std::nullopt,
                        std::nullopt,
                        payload_from(doc.at("reveal"), "reveal"),
                        {},
                        doc.value("implicit_q", true),
                        doc.value("implicit_r", true),
                        std::nullopt};
        if (doc.contains("question")) {
            f.question = doc["question"].get<std::string>();
        }
        if (doc.contains("answer")) {
            f.answer = payload_from(doc["answer"], "answer");
        }
        f.distance = doc.contains("distance") ? distance::parse_distance_spec(doc["distance"].dump())
                                              : distance::DistanceSpec{};
        if (doc.contains("lexicon")) {
            f.lexicon = emotion::load_lexicon(dir / doc["lexicon"].get<std::string>());
        }
        return f;
    });
}

namespace {

FixtureRun run_sigma(const SigmaFixture& f)
{
    auto bank = std::make_shared<protocol::SimulatedBank>(f.balance, f.token);
    protocol::BankProver prover(bank, f.prover_token);
    auto session = protocol::new_session(protocol::ProtocolKind::Sigma, protocol::make_bank_instance(bank), nullptr, f.id);
    session = protocol::step(session, prover.setup(Timestamp(0)));
    const auto challenge = protocol::withdraw_challenge(f.challenge, Timestamp(1000));
    session = protocol::step(session, challenge);
    session = protocol::step(session, prover.respond(challenge, Timestamp(2000)));
    return {f.id, session.transcript(), std::nullopt, std::nullopt};
}

FixtureRun run_aporia(const AporiaFixture& f,
                      const emotion::EmotionTaxonomy& taxonomy,
                      const emotion::ToneLexicon& fallback_lexicon,
                      const RunOptions& options)
{
    const auto spec = options.distance.value_or(f.distance);
    auto registry = std::make_shared<protocol::ProtocolRegistry>();
    registry->add_knowledge(f.kb);
    registry->add_distance("fixture", spec);
    registry->add_responder(f.kb.id(), [](std::string_view p, std::string_view q, const knowledge::KnowledgeBase& kb) {
        return emotion::answer(p, q, kb);
    });
    auto session = protocol::new_session(protocol::ProtocolKind::Aporia,
                                         protocol::AporiaConfig{f.kb.id(), "fixture", f.implicit_q, f.implicit_r},
                                         registry, f.id);
    session = protocol::step(session, protocol::make_premise(f.premise, f.question, Timestamp(0)));
    if (f.answer) {
        session = protocol::step(session, protocol::make_message(MessageKind::Answer, *f.answer, Timestamp(0)));
    } else {
        session = protocol::step(session, protocol::resolve_implicit(session, f.kb));
    }
    session = protocol::step(session, protocol::make_message(MessageKind::Reveal, f.reveal, Timestamp(1000)));

    FixtureRun run{f.id, session.transcript(), std::nullopt, std::nullopt};
    const auto& result = std::get<distance::AporiaResult>(*run.transcript.outcome);
    if (spec.normalized() && !spec.numeric() && is_text(f.reveal)) {
        const auto& premise = run.transcript.messages.front();
        const std::string texts[] = {f.premise, premise.question.value_or(""), std::get<std::string>(f.reveal)};
        const auto& lexicon = f.lexicon ? *f.lexicon : fallback_lexicon;
        run.valence = emotion::tone(texts, lexicon);
        run.emotion = emotion::compose(*run.valence, result, taxonomy);
    }
    return run;
}

}  // namespace

FixtureRun run_fixture(const ProtocolFixture& fixture,
                       const emotion::EmotionTaxonomy& taxonomy,
                       const emotion::ToneLexicon& fallback_lexicon,
                       const RunOptions& options)
{
    if (const auto* sigma = std::get_if<SigmaFixture>(&fixture)) {
        return run_sigma(*sigma);
    }
    return run_aporia(std::get<AporiaFixture>(fixture), taxonomy, fallback_lexicon, options);
}

std::string format_run(const FixtureRun& run)
{
    const auto& t = run.transcript;
    std::string out = fmt::format("fixture: {}\nprotocol: {} ({} -> {})\n", run.fixture_id,
                                  protocol::to_string(t.protocol_kind), t.roles.initiator, t.roles.responder);
    auto flag = [](bool implicit) { return implicit ? " (implicit)" : ""; };
    for (const auto& m : t.messages) {
        switch (m.kind) {
        case MessageKind::Setup: out += fmt::format("a: {}\n", describe(m.payload)); break;
        case MessageKind::Challenge: out += fmt::format("e: {}\n", describe(m.payload)); break;
        case MessageKind::Response: out += fmt::format("z: {}\n", describe(m.payload)); break;
        case MessageKind::Premise:
            out += fmt::format("P: {}\n", describe(m.payload));
            out += fmt::format("Q: {}{}\n", m.question.value_or(""), flag(m.question_implicit));
            break;
        case MessageKind::Answer: out += fmt::format("R: {}{}\n", describe(m.payload), flag(m.implicit)); break;
        case MessageKind::Reveal: out += fmt::format("R': {}\n", describe(m.payload)); break;
        default: break;
        }
    }
    if (t.outcome) {
        if (const auto* d = std::get_if<protocol::SigmaDecision>(&*t.outcome)) {
            out += fmt::format("decision: {}\n", *d == protocol::SigmaDecision::Accept ? "accept" : "reject");
        } else {
            const auto& r = std::get<distance::AporiaResult>(*t.outcome);
            out += fmt::format("distance: {}\n", distance::to_string(r.decomposition.kind));
            if (r.decomposition.theory_id) {
                out += fmt::format("theory: {} (gamma {:.6f}, threshold {:.6f})\n", *r.decomposition.theory_id,
                                   r.decomposition.gamma.value_or(0.0), r.decomposition.threshold.value_or(0.0));
            }
            out += fmt::format("pi: {:.6f}{}\n", r.pi, r.normalized ? "" : " (unnormalized)");
        }
    }
    if (run.valence) {
        out += fmt::format("valence: {:.6f}\n", *run.valence);
    }
    if (run.emotion) {
        out += fmt::format("emotion: {}\n", *run.emotion);
    }
    return out;
}

std::string run_json(const FixtureRun& run)
{
    json messages = json::array();
    json outcome;
    std::istringstream lines(protocol::to_ndjson(run.transcript));
    std::string line;
    while (std::getline(lines, line)) {
        auto j = json::parse(line);
        if (j.contains("outcome")) {
            outcome = j["outcome"];
        } else {
            messages.push_back(std::move(j));
        }
    }
    json doc{{"fixture", run.fixture_id},
             {"protocol", protocol::to_string(run.transcript.protocol_kind)},
             {"messages", messages},
             {"outcome", outcome}};
    doc["valence"] = run.valence ? json(*run.valence) : json(nullptr);
    doc["emotion"] = run.emotion ? json(*run.emotion) : json(nullptr);
    return doc.dump(2);
}

}  // namespace aporia::runner
