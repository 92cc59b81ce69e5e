#include "commands.hpp"

#include <aporia/emotion.hpp>
#include <aporia/error.hpp>
#include <aporia/ledger.hpp>
#include <aporia/poet_server.hpp>
#include <aporia/policy.hpp>
#include <aporia/runner.hpp>
#include <aporia/timing.hpp>
#include <aporia/transcript_io.hpp>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pthread.h>

#ifndef APORIA_INSTALLED_CONFIG_DIR
#define APORIA_INSTALLED_CONFIG_DIR ""
#endif

namespace aporia::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_exists(const fs::path& path)
{
    if (!fs::exists(path)) {
        throw Error(Errc::io_error, "no such file or directory: " + path.string());
    }
}

// APORIA_CONFIG_DIR, then ./config, then the installed copy.
std::optional<fs::path> config_dir()
{
    if (const char* env = std::getenv("APORIA_CONFIG_DIR"); env != nullptr && *env != '\0') {
        return fs::path(env);
    }
    if (fs::is_directory("config")) {
        return fs::path("config");
    }
    if (const fs::path installed = APORIA_INSTALLED_CONFIG_DIR; !installed.empty() && fs::is_directory(installed)) {
        return installed;
    }
    return std::nullopt;
}

emotion::EmotionTaxonomy taxonomy_from(const std::optional<fs::path>& explicit_path)
{
    if (explicit_path) {
        require_exists(*explicit_path);
        return emotion::load_taxonomy(*explicit_path);
    }
    if (auto dir = config_dir(); dir && fs::exists(*dir / "taxonomy.json")) {
        return emotion::load_taxonomy(*dir / "taxonomy.json");
    }
    return emotion::default_taxonomy();
}

emotion::ToneLexicon lexicon_from(const std::optional<fs::path>& explicit_path)
{
    if (explicit_path) {
        require_exists(*explicit_path);
        return emotion::load_lexicon(*explicit_path);
    }
    if (auto dir = config_dir(); dir && fs::exists(*dir / "lexicon.json")) {
        return emotion::load_lexicon(*dir / "lexicon.json");
    }
    return emotion::ToneLexicon("empty", {});
}

}  // namespace

int run_protocol(const RunProtocolArgs& args, std::ostream& out)
{
    require_exists(args.fixture);
    const auto fixture = runner::load_protocol_fixture(args.fixture);
    runner::RunOptions options;
    if (args.distance) {
        distance::DistanceSpec spec;
        spec.kind = distance::distance_kind_from_string(*args.distance);
        if (spec.kind == distance::DistanceKind::TheoryCost) {
            const auto* aporia = std::get_if<runner::AporiaFixture>(&fixture);
            spec.theory_id = args.theory.value_or(aporia ? aporia->distance.theory_id : std::string());
        }
        distance::validate(spec);
        options.distance = spec;
    }
    const auto run = runner::run_fixture(fixture, taxonomy_from(args.taxonomy), lexicon_from(args.lexicon), options);
    if (args.transcript_out) {
        std::ofstream file(*args.transcript_out, std::ios::trunc);
        file << protocol::to_ndjson(run.transcript);
        if (!file) {
            throw Error(Errc::io_error, "cannot write " + args.transcript_out->string());
        }
    }
    out << (args.json ? runner::run_json(run) + "\n" : runner::format_run(run));
    return 0;
}

int timing_report(const TimingReportArgs& args, std::ostream& out)
{
    require_exists(args.dir);
    const auto timelines = timing::load_timeline_dir(args.dir);
    if (timelines.empty()) {
        throw Error(Errc::io_error, "no timeline CSV files in " + args.dir.string());
    }
    if (!args.json) {
        out << timing::format_report(timelines);
        return 0;
    }
    json rows = json::array();
    for (const auto& t : timelines) {
        json events = json::array();
        for (const auto& e : t.events()) {
            events.push_back({{"event", e.name}, {"time_s", e.time_s}});
        }
        json steps = json::array();
        for (const auto& s : timing::intervals(t)) {
            steps.push_back({{"from", s.from}, {"to", s.to}, {"duration_s", s.duration_s}});
        }
        rows.push_back({{"label", t.label()}, {"events", events}, {"steps", steps}});
    }
    json averages = json::array();
    for (const auto& s : timing::summarize(timelines)) {
        averages.push_back({{"from", s.from},
                            {"to", s.to},
                            {"mean_s", s.mean_s},
                            {"rounded_s", timing::round_half_up(s.mean_s)},
                            {"pause", timing::to_string(timing::classify_pause(s.mean_s))}});
    }
    out << json{{"timelines", rows}, {"average_steps", averages}}.dump(2) << '\n';
    return 0;
}

int trust_replay(const TrustReplayArgs& args, std::ostream& out)
{
    require_exists(args.log_dir);
    const auto policy = trust::parse_policy(args.policy);
    const auto ledger = trust::TrustLedger::replay(args.log_dir);
    const auto services = ledger->services();
    std::optional<std::string> selected;
    if (!services.empty()) {
        selected = trust::select_service(services, policy, *ledger);
    }

    if (args.json) {
        json rows = json::array();
        for (const auto& id : services) {
            const auto state = ledger->state(id);
            json resources = json::object();
            for (const auto& [r, agg] : state.resources) {
                json last = nullptr;
                if (agg.last) {
                    last = {{"seq", agg.last->seq},
                            {"emotion", agg.last->emotion},
                            {"intensity", agg.last->intensity},
                            {"direction", trust::to_string(agg.last->direction)}};
                }
                resources[std::string(trust::to_string(r))] = {{"count", agg.count},
                                                               {"favorable_mean", agg.mean(trust::Direction::Favorable)},
                                                               {"unfavorable_mean", agg.mean(trust::Direction::Unfavorable)},
                                                               {"last", last}};
            }
            rows.push_back({{"service", id},
                            {"events", state.count},
                            {"compliant", trust::evaluate_policy(policy, state)},
                            {"resources", resources}});
        }
        out << json{{"policy", trust::to_string(policy)},
                    {"services", rows},
                    {"selected", selected ? json(*selected) : json(nullptr)}}
                   .dump(2)
            << '\n';
        return 0;
    }

    out << "policy: " << trust::to_string(policy) << '\n';
    if (!services.empty()) {
        std::size_t width = std::string_view("service").size();
        for (const auto& id : services) {
            width = std::max(width, id.size());
        }
        out << fmt::format("{:<{}}  {:>6}  {:>14}  {:>16}  {}\n", "service", width, "events", "money.favorable",
                           "money.unfavorable", "policy");
        for (const auto& id : services) {
            const auto state = ledger->state(id);
            const auto* money = state.find(trust::Resource::Money);
            out << fmt::format("{:<{}}  {:>6}  {:>15.6f}  {:>17.6f}  {}\n", id, width, state.count,
                               money ? money->mean(trust::Direction::Favorable) : 0.0,
                               money ? money->mean(trust::Direction::Unfavorable) : 0.0,
                               trust::evaluate_policy(policy, state) ? "pass" : "fail");
        }
    }
    if (selected) {
        out << "selected: " << *selected << '\n';
    } else {
        out << "no compliant services\n";
    }
    return 0;
}

namespace {

std::shared_ptr<poet::AgentRegistry> agents_from(const PoetServeArgs& args)
{
    const auto taxonomy = taxonomy_from(args.taxonomy);
    const auto fallback = lexicon_from(std::nullopt);
    auto registry = std::make_shared<poet::AgentRegistry>();
    for (const auto& path : args.agents) {
        require_exists(path);
        const auto fixture = runner::load_protocol_fixture(path);
        const auto* aporia = std::get_if<runner::AporiaFixture>(&fixture);
        if (aporia == nullptr) {
            throw Error(Errc::invalid_argument, fmt::format("{} is not an aporia fixture", path.string()));
        }
        auto kb = std::make_shared<const knowledge::KnowledgeBase>(aporia->kb);
        const auto lexicon = aporia->lexicon.value_or(fallback);
        const auto spec = aporia->distance;
        // Fails early on a kb without catch-all.
        poet::ScriptedAgent probe(kb, spec, lexicon, taxonomy);
        registry->add(aporia->id, [kb, spec, lexicon, taxonomy] {
            return std::make_unique<poet::ScriptedAgent>(kb, spec, lexicon, taxonomy);
        });
    }
    return registry;
}

}  // namespace

int poet_serve(const PoetServeArgs& args, std::ostream& out)
{
    if (args.stdio == args.address.has_value()) {
        throw Error(Errc::invalid_argument, "give either an address or --stdio");
    }
    poet::ServerOptions options;
    options.export_dir = args.export_dir;
    auto context = std::make_shared<poet::ServerContext>(agents_from(args), options);

    if (args.stdio) {
        poet::serve_stdio(std::cin, out, context);
        return 0;
    }

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const auto endpoint = net::parse_endpoint(*args.address);
    auto server = poet::PoetServer::start(endpoint, context);
    if (args.json) {
        out << json{{"listening", fmt::format("{}:{}", endpoint.host, server->port())}}.dump() << std::endl;
    } else {
        out << fmt::format("listening on {}:{}", endpoint.host, server->port()) << std::endl;
    }
    int received = 0;
    sigwait(&signals, &received);
    server->stop();
    return 0;
}

int export_session(const ExportArgs& args, std::ostream& out)
{
    const auto file = args.dir / (args.session_id + ".ndjson");
    require_exists(file);
    std::ifstream in(file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto session = poet::import_ndjson(text);
    if (!poet::equivalent(session, poet::import_ndjson(poet::export_ndjson(session)))) {
        throw Error(Errc::parse_error, "export does not survive a replay round trip");
    }
    if (!args.json) {
        out << text;
        return 0;
    }
    json rounds = json::array();
    for (const auto& r : session.rounds()) {
        const auto report = poet::reported_emotion(r);
        rounds.push_back({{"emotion", report.label}, {"pi", report.pi}});
    }
    out << json{{"session", session.id()},
                {"phase", poet::to_string(session.phase())},
                {"agreed", session.agreed_emotions()},
                {"verdict", session.verdict() ? json(poet::to_string(*session.verdict())) : json(nullptr)},
                {"rounds", rounds},
                {"ndjson", text}}
               .dump(2)
        << '\n';
    return 0;
}

}  // namespace aporia::cli
