#include "gen.hpp"
#include "poet_language.hpp"

#include <aporia/error.hpp>
#include <aporia/poet_server.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

namespace {

using namespace aporia;
using namespace aporia::poet;
using aporia::testing::fixture;
using nlohmann::json;

const std::vector<std::string> proposal = {"fear", "amusement", "neutral", "surprise"};
const std::string scream_premise = "A girl alone at home picks up a menacing call from a stranger who may be a killer.";

AgentFactory factory_for(const std::string& name)
{
    return [name] {
        const auto lex = fixture(name) / "lexicon.json";
        return scripted_agent(knowledge::load_knowledge_base(fixture(name) / "kb.json"),
                              {distance::DistanceKind::TokenSimilarity},
                              std::filesystem::exists(lex) ? emotion::load_lexicon(lex) : emotion::ToneLexicon("e", {}),
                              emotion::default_taxonomy());
    };
}

std::shared_ptr<ServerContext> context(ServerOptions options = {})
{
    auto reg = std::make_shared<AgentRegistry>();
    reg->add("scream", factory_for("scream")).add("scary-movie", factory_for("scary-movie"));
    return std::make_shared<ServerContext>(reg, std::move(options));
}

json one(const std::vector<std::string>& replies)
{
    EXPECT_EQ(replies.size(), 1u);
    return json::parse(replies.at(0));
}

std::string hello(std::optional<std::string> agent = std::nullopt)
{
    json j{{"t", "hello"}, {"emotions", proposal}};
    if (agent) {
        j["agent"] = *agent;
    }
    return j.dump();
}

std::string premise_frame()
{
    return json{{"t", "premise"}, {"p", scream_premise}, {"q", "what happens next?"}}.dump();
}

std::string reveal_frame(const std::string& rp)
{
    return json{{"t", "reveal"}, {"rp", rp}}.dump();
}

TEST(Handler, HappyPathWithExport)
{
    const auto dir = std::filesystem::temp_directory_path() / "aporia_handler_export";
    std::filesystem::remove_all(dir);
    std::int64_t t = 1000;
    ConnectionHandler h(context({dir}), [&] { return t += 10; });

    const auto agreed = one(h.handle_line(hello()));
    EXPECT_EQ(agreed["t"], "agreed");
    EXPECT_EQ(agreed["emotions"].get<std::vector<std::string>>(), proposal);
    const std::string id = agreed["session"];

    const auto ans = one(h.handle_line(premise_frame()));
    EXPECT_EQ(ans["t"], "answer");
    EXPECT_EQ(ans["r"], "Yes, somewhere outside");
    const auto emo = one(h.handle_line(reveal_frame("Yes, hidden inside the house")));
    EXPECT_EQ(emo["t"], "emotion");
    EXPECT_EQ(emo["e"], "fear");
    EXPECT_NEAR(emo["pi"].get<double>(), 1.0 - 1.0 / 7.0, 1e-12);
    EXPECT_EQ(h.handle_line(R"({"t":"next"})"), std::vector<std::string>{R"({"t":"next"})"});
    one(h.handle_line(premise_frame()));
    one(h.handle_line(reveal_frame("The awkward killer")));
    const auto verdict = one(h.handle_line(R"({"t":"verdict","v":"machine"})"));
    EXPECT_EQ(verdict["v"], "machine");

    const auto exported = one(h.handle_line(R"({"t":"export"})"));
    EXPECT_EQ(exported["session"], id);
    std::ifstream file(dir / (id + ".ndjson"));
    ASSERT_TRUE(file.good());
    std::stringstream buf;
    buf << file.rdbuf();
    EXPECT_EQ(buf.str(), exported["ndjson"].get<std::string>());
    EXPECT_TRUE(equivalent(*h.session(), import_ndjson(buf.str())));
    std::filesystem::remove_all(dir);
}

TEST(Handler, MalformedFramesLeaveSessionUnchanged)
{
    ConnectionHandler h(context());
    one(h.handle_line(hello()));
    one(h.handle_line(premise_frame()));
    const auto before = export_ndjson(*h.session());
    for (const auto* bad : {"not json", "[1,2]", R"({"x":1})", R"({"t":7})", R"({"t":"reveal"})",
                            R"({"t":"reveal","rp":3})", R"({"t":"answer","r":"forged"})",
                            R"({"t":"emotion","e":"fear","pi":0.5})", R"({"t":"bogus"})", R"({"t":"next"})",
                            R"({"t":"premise","p":"x","q":"y"})", R"({"t":"verdict","v":"human"})"}) {
        const auto reply = one(h.handle_line(bad));
        EXPECT_EQ(reply["t"], "error") << bad;
        EXPECT_TRUE(reply["msg"].is_string());
        EXPECT_EQ(h.session()->phase(), PoetPhase::InRound);
        EXPECT_EQ(h.session()->step(), RoundStep::Reveal);
        EXPECT_EQ(export_ndjson(*h.session()), before) << bad;
    }
}

TEST(Handler, ClientAnswerFramesAreNotAllowed)
{
    ConnectionHandler h(context());
    one(h.handle_line(hello()));
    const auto reply = one(h.handle_line(R"({"t":"answer","r":"x","ts":0})"));
    EXPECT_EQ(reply["t"], "error");
}

TEST(Handler, OneSessionPerConnection)
{
    ConnectionHandler h(context());
    one(h.handle_line(hello()));
    EXPECT_EQ(one(h.handle_line(hello()))["t"], "error");
}

TEST(Handler, UncoveredProposalIsInconclusive)
{
    ConnectionHandler h(context());
    const auto reply = one(h.handle_line(R"({"t":"hello","emotions":["ennui"]})"));
    EXPECT_EQ(reply["t"], "inconclusive");
    EXPECT_EQ(one(h.handle_line(premise_frame()))["t"], "error");
}

TEST(Handler, NamedAgentSelection)
{
    ConnectionHandler h(context());
    one(h.handle_line(hello("scary-movie")));
    EXPECT_EQ(one(h.handle_line(premise_frame()))["r"], "Yes, hidden inside the house");
    EXPECT_EQ(one(h.handle_line(reveal_frame("The awkward killer")))["e"], "amusement");
    ConnectionHandler other(context());
    EXPECT_EQ(one(other.handle_line(hello("nobody")))["t"], "error");
    EXPECT_FALSE(other.session().has_value());
}

TEST(Handler, FrameLanguageEnumeration)
{
    const auto r = aporia::testing::enumerate_server_language(8);
    EXPECT_TRUE(r.ok()) << r.counterexample;
    EXPECT_EQ(r.cases, 6'725'601u);
}

std::vector<json> converse(const net::Endpoint& ep, const std::vector<std::string>& frames)
{
    auto stream = net::connect_tcp(ep);
    std::vector<json> out;
    for (const auto& f : frames) {
        stream.write_line(f);
        const auto line = stream.read_line();
        if (!line) {
            break;
        }
        out.push_back(json::parse(*line));
    }
    return out;
}

TEST(Server, ConcurrentConnectionsAreIsolated)
{
    auto server = PoetServer::start(net::parse_endpoint("127.0.0.1:0"), context());
    const net::Endpoint ep{"127.0.0.1", server->port()};
    std::vector<json> a;
    std::vector<json> b;
    std::thread ta([&] {
        a = converse(ep, {hello(), premise_frame(), reveal_frame("Yes, hidden inside the house"), R"({"t":"verdict","v":"human"})"});
    });
    std::thread tb([&] {
        b = converse(ep, {hello("scary-movie"), premise_frame(), reveal_frame("The awkward killer"),
                          R"({"t":"verdict","v":"machine"})"});
    });
    ta.join();
    tb.join();
    server->stop();
    ASSERT_EQ(a.size(), 4u);
    ASSERT_EQ(b.size(), 4u);
    EXPECT_NE(a[0]["session"], b[0]["session"]);
    EXPECT_EQ(a[2]["e"], "fear");
    EXPECT_EQ(b[2]["e"], "amusement");
    EXPECT_NEAR(a[2]["pi"].get<double>(), b[2]["pi"].get<double>(), 1e-9);
    EXPECT_EQ(a[3]["v"], "human");
    EXPECT_EQ(b[3]["v"], "machine");
}

TEST(Server, StdioSession)
{
    std::istringstream in(hello() + "\n" + premise_frame() + "\n\n" + reveal_frame("Yes, hidden inside the house") +
                          "\n{\"t\":\"verdict\",\"v\":\"human\"}\n");
    std::ostringstream out;
    serve_stdio(in, out, context());
    std::istringstream lines(out.str());
    std::vector<json> replies;
    for (std::string line; std::getline(lines, line);) {
        replies.push_back(json::parse(line));
    }
    ASSERT_GE(replies.size(), 4u);
    EXPECT_EQ(replies.front()["t"], "agreed");
    EXPECT_EQ(replies.back()["t"], "verdict");
}

TEST(Server, RemoteAgentDrivesLocalSession)
{
    auto server = PoetServer::start(net::parse_endpoint("127.0.0.1:0"), context());
    RemoteAgent remote(net::Endpoint{"127.0.0.1", server->port()}, "scream");
    auto s = start_test(proposal, remote, "remote", Timestamp(0));
    ASSERT_EQ(s.phase(), PoetPhase::InRound);
    s = poet_step(s, SendPremise{scream_premise, "q", Timestamp(1)}, remote);
    s = poet_step(s, AgentAnswer{Timestamp(2)}, remote);
    s = poet_step(s, SendReveal{"Yes, hidden inside the house", Timestamp(3)}, remote);
    s = poet_step(s, AgentEmotion{Timestamp(4)}, remote);
    EXPECT_EQ(reported_emotion(s.rounds().back()).label, "fear");
    s = poet_step(s, NextRound{Timestamp(5)}, remote);
    EXPECT_EQ(s.step(), RoundStep::Premise);
    server->stop();
}

TEST(Endpoint, Parse)
{
    const auto ep = net::parse_endpoint("localhost:7070");
    EXPECT_EQ(ep.host, "localhost");
    EXPECT_EQ(ep.port, 7070);
    EXPECT_THROW(net::parse_endpoint("nope"), Error);
    EXPECT_THROW(net::parse_endpoint("h:99999"), Error);
}

}  // namespace
