#include "aporia/transcript_io.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <sstream>

namespace aporia::protocol {

using nlohmann::json;

namespace {

json payload_json(const Payload& p)
{
    if (const auto* s = std::get_if<std::string>(&p)) {
        return *s;
    }
    return std::get<double>(p);
}

Payload payload_from(const json& j)
{
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_number()) {
        return j.get<double>();
    }
    throw Error(Errc::parse_error, "payload must be a string or a number");
}

json result_json(const distance::AporiaResult& r)
{
    const auto& d = r.decomposition;
    json dec = {{"kind", distance::to_string(d.kind)}};
    if (d.premise) dec["p"] = *d.premise;
    if (d.question) dec["q"] = *d.question;
    if (d.answer) dec["r"] = payload_json(*d.answer);
    if (d.reveal) dec["rp"] = payload_json(*d.reveal);
    if (d.theory_id) dec["theory"] = *d.theory_id;
    if (d.gamma) dec["gamma"] = *d.gamma;
    if (d.threshold) dec["threshold"] = *d.threshold;
    return {{"pi", r.pi}, {"normalized", r.normalized}, {"decomposition", dec}};
}

distance::AporiaResult result_from(const json& j)
{
    distance::AporiaResult r;
    r.pi = j.at("pi").get<double>();
    r.normalized = j.at("normalized").get<bool>();
    const json& dec = j.at("decomposition");
    auto& d = r.decomposition;
    d.kind = distance::distance_kind_from_string(dec.at("kind").get<std::string>());
    if (dec.contains("p")) d.premise = dec["p"].get<std::string>();
    if (dec.contains("q")) d.question = dec["q"].get<std::string>();
    if (dec.contains("r")) d.answer = payload_from(dec["r"]);
    if (dec.contains("rp")) d.reveal = payload_from(dec["rp"]);
    if (dec.contains("theory")) d.theory_id = dec["theory"].get<std::string>();
    if (dec.contains("gamma")) d.gamma = dec["gamma"].get<double>();
    if (dec.contains("threshold")) d.threshold = dec["threshold"].get<double>();
    return r;
}

}  // namespace

std::string aporia_result_json(const distance::AporiaResult& result)
{
    return result_json(result).dump();
}

std::string to_ndjson(const Transcript& transcript)
{
    std::string out;
    std::size_t seq = 0;
    for (const auto& m : transcript.messages) {
        json payload;
        if (m.kind == MessageKind::Premise) {
            payload = {{"p", payload_json(m.payload)},
                       {"q", m.question ? json(*m.question) : json(nullptr)},
                       {"q_implicit", m.question_implicit}};
        } else if (m.kind == MessageKind::EmotionReport) {
            payload = {{"e", payload_json(m.payload)},
                       {"pi", m.reported_pi ? json(*m.reported_pi) : json(nullptr)}};
        } else {
            payload = payload_json(m.payload);
        }
        json line = {{"seq", ++seq},
                     {"kind", to_string(m.kind)},
                     {"payload", payload},
                     {"timestamp", m.timestamp.seconds()},
                     {"implicit", m.implicit}};
        out += line.dump();
        out += '\n';
    }
    if (transcript.outcome) {
        json outcome;
        if (const auto* d = std::get_if<SigmaDecision>(&*transcript.outcome)) {
            outcome = *d == SigmaDecision::Accept ? "accept" : "reject";
        } else {
            outcome = result_json(std::get<distance::AporiaResult>(*transcript.outcome));
        }
        out += json{{"outcome", outcome}}.dump();
        out += '\n';
    }
    return out;
}

Transcript parse_ndjson(std::string_view text, std::string session_id)
{
    Transcript t;
    t.session_id = std::move(session_id);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t expected_seq = 1;
    bool saw_outcome = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (saw_outcome) {
            throw Error(Errc::parse_error, "transcript continues after its outcome line");
        }
        const json j = detail::parse_json(line, "transcript line");
        detail::with_parse_errors("transcript line", [&] {
            if (j.contains("outcome")) {
                const json& o = j["outcome"];
                if (o.is_string()) {
                    const auto s = o.get<std::string>();
                    if (s != "accept" && s != "reject") {
                        throw Error(Errc::parse_error, "unknown sigma outcome '" + s + "'");
                    }
                    t.outcome = s == "accept" ? SigmaDecision::Accept : SigmaDecision::Reject;
                } else {
                    t.outcome = result_from(o);
                }
                saw_outcome = true;
                return;
            }
            if (j.at("seq").get<std::size_t>() != expected_seq) {
                throw Error(Errc::parse_error, fmt::format("expected seq {}", expected_seq));
            }
            ++expected_seq;
            ProtocolMessage m;
            m.kind = message_kind_from_string(j.at("kind").get<std::string>());
            const json& payload = j.at("payload");
            if (m.kind == MessageKind::Premise) {
                m.payload = payload_from(payload.at("p"));
                if (!payload.at("q").is_null()) {
                    m.question = payload["q"].get<std::string>();
                }
                m.question_implicit = payload.value("q_implicit", false);
            } else if (m.kind == MessageKind::EmotionReport) {
                m.payload = payload_from(payload.at("e"));
                if (payload.contains("pi") && !payload["pi"].is_null()) {
                    m.reported_pi = payload["pi"].get<double>();
                }
            } else {
                m.payload = payload_from(payload);
            }
            m.timestamp = Timestamp::from_seconds(j.at("timestamp").get<double>());
            m.implicit = j.at("implicit").get<bool>();
            t.messages.push_back(std::move(m));
        });
    }
    if (!t.messages.empty()) {
        const auto first = t.messages.front().kind;
        t.protocol_kind = first == MessageKind::Setup ? ProtocolKind::Sigma : ProtocolKind::Aporia;
    }
    t.roles = roles_for(t.protocol_kind);
    return t;
}

}  // namespace aporia::protocol
