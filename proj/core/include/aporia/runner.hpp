#pragma once

#include "aporia/distance.hpp"
#include "aporia/emotion.hpp"
#include "aporia/knowledge.hpp"
#include "aporia/protocol.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

namespace aporia::runner {

// protocol.json with "kind": "aporia". Paths are relative to the fixture
// directory. A missing "answer" leaves R implicit; a missing "question"
// leaves Q implicit.
struct AporiaFixture {
    std::string id;
    knowledge::KnowledgeBase kb;
    std::string premise;
    std::optional<std::string> question;
    std::optional<Payload> answer;
    Payload reveal;
    distance::DistanceSpec distance;
    bool implicit_q = true;
    bool implicit_r = true;
    std::optional<emotion::ToneLexicon> lexicon;
};

// protocol.json with "kind": "sigma": a simulated bank and one withdraw
// challenge. Without "prover_token" the prover holds no token.
struct SigmaFixture {
    std::string id;
    std::int64_t balance = 0;
    std::string token;
    std::optional<std::string> prover_token;
    std::int64_t challenge = 0;
};

using ProtocolFixture = std::variant<AporiaFixture, SigmaFixture>;

// Accepts the fixture directory or its protocol.json.
ProtocolFixture load_protocol_fixture(const std::filesystem::path& path);

struct FixtureRun {
    std::string fixture_id;
    protocol::Transcript transcript;
    std::optional<double> valence;       // normalized text distances only
    std::optional<std::string> emotion;
};

struct RunOptions {
    std::optional<distance::DistanceSpec> distance;   // replaces the fixture's
};

FixtureRun run_fixture(const ProtocolFixture& fixture,
                       const emotion::EmotionTaxonomy& taxonomy,
                       const emotion::ToneLexicon& fallback_lexicon,
                       const RunOptions& options = {});

// Plain text report; stable for fixed inputs.
std::string format_run(const FixtureRun& run);

// {"fixture", "protocol", "messages": [...], "outcome", "valence", "emotion"}
std::string run_json(const FixtureRun& run);

}  // namespace aporia::runner
