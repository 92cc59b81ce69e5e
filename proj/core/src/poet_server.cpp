#include "aporia/poet_server.hpp"

#include "aporia/error.hpp"
#include "internal.hpp"

#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <istream>
#include <list>
#include <mutex>
#include <ostream>
#include <thread>

namespace aporia::poet {

using nlohmann::json;

AgentRegistry& AgentRegistry::add(std::string name, AgentFactory factory)
{
    if (name.empty() || !factory) {
        throw Error(Errc::invalid_argument, "agent registrations need a name and a factory");
    }
    if (factories_.empty()) {
        default_ = name;
    }
    factories_[std::move(name)] = std::move(factory);
    return *this;
}

std::unique_ptr<Agent> AgentRegistry::create(const std::optional<std::string>& name) const
{
    const std::string& key = name.value_or(default_);
    auto it = factories_.find(key);
    if (it == factories_.end()) {
        throw Error(Errc::not_found, fmt::format("no agent named '{}'", key));
    }
    auto agent = it->second();
    if (!agent) {
        throw Error(Errc::invalid_argument, fmt::format("agent factory '{}' returned nothing", key));
    }
    return agent;
}

std::vector<std::string> AgentRegistry::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) {
        out.push_back(name);
    }
    return out;
}

ServerContext::ServerContext(std::shared_ptr<const AgentRegistry> agents, ServerOptions options)
    : agents_(std::move(agents)), options_(std::move(options))
{
    if (!agents_ || agents_->empty()) {
        throw Error(Errc::invalid_argument, "the server needs at least one agent");
    }
    if (options_.export_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*options_.export_dir, ec);
        if (ec) {
            throw Error(Errc::io_error, fmt::format("cannot create {}: {}", options_.export_dir->string(), ec.message()));
        }
    }
}

std::string ServerContext::next_session_id()
{
    return fmt::format("s{}", counter_.fetch_add(1) + 1);
}

std::int64_t steady_millis()
{
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

std::string error_frame(std::string_view message)
{
    return json{{"t", "error"}, {"msg", message}}.dump();
}

ConnectionHandler::ConnectionHandler(std::shared_ptr<ServerContext> context, MillisClock clock)
    : context_(std::move(context)), clock_(std::move(clock))
{
}

Timestamp ConnectionHandler::now() const
{
    return Timestamp(clock_() - start_ms_);
}

void ConnectionHandler::persist() const
{
    const auto& dir = context_->options().export_dir;
    if (!dir || !session_) {
        return;
    }
    const auto target = *dir / (session_->id() + ".ndjson");
    const auto tmp = *dir / (session_->id() + ".ndjson.tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << export_ndjson(*session_);
        if (!out) {
            throw Error(Errc::io_error, "cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

void ConnectionHandler::finish()
{
    try {
        persist();
    } catch (const std::exception&) {
        // Nothing to report to a closed connection.
    }
}

namespace {

const std::string& string_field(const json& frame, const char* key)
{
    auto it = frame.find(key);
    if (it == frame.end() || !it->is_string()) {
        throw Error(Errc::parse_error, fmt::format("frame needs a string field '{}'", key));
    }
    return it->get_ref<const std::string&>();
}

}  // namespace

std::vector<std::string> ConnectionHandler::handle_line(std::string_view line)
{
    json frame;
    try {
        frame = json::parse(line);
    } catch (const json::exception&) {
        return {error_frame("malformed frame: not JSON")};
    }
    if (!frame.is_object() || !frame.contains("t") || !frame["t"].is_string()) {
        return {error_frame("malformed frame: expected an object with a string 't'")};
    }

    try {
        const std::string type = frame["t"].get<std::string>();
        if (type == "hello") {
            if (session_) {
                throw Error(Errc::out_of_order, "the session is already negotiated");
            }
            auto it = frame.find("emotions");
            if (it == frame.end() || !it->is_array()) {
                throw Error(Errc::parse_error, "hello needs an 'emotions' array");
            }
            std::vector<std::string> proposal;
            for (const auto& e : *it) {
                if (!e.is_string()) {
                    throw Error(Errc::parse_error, "emotion labels must be strings");
                }
                proposal.push_back(e.get<std::string>());
            }
            std::optional<std::string> agent_name;
            if (frame.contains("agent")) {
                agent_name = string_field(frame, "agent");
            }
            auto agent = context_->agents().create(agent_name);
            const std::int64_t start = clock_();
            auto session = start_test(proposal, *agent, context_->next_session_id(), Timestamp(0));
            start_ms_ = start;
            agent_ = std::move(agent);
            session_ = std::move(session);
            json reply{{"t", session_->closed() ? "inconclusive" : "agreed"}, {"session", session_->id()}};
            if (!session_->closed()) {
                reply["emotions"] = session_->agreed_emotions();
            } else {
                persist();
            }
            return {reply.dump()};
        }
        if (type == "answer" || type == "emotion" || type == "agreed" || type == "inconclusive" || type == "error") {
            throw Error(Errc::not_allowed, fmt::format("'{}' frames are sent by the server only", type));
        }
        if (type != "premise" && type != "reveal" && type != "next" && type != "verdict" && type != "export") {
            throw Error(Errc::parse_error, fmt::format("unknown frame type '{}'", type));
        }
        if (!session_) {
            throw Error(Errc::out_of_order, "send hello first");
        }
        const Clock agent_clock = [this] { return now(); };

        if (type == "premise") {
            const auto& p = string_field(frame, "p");
            const auto& q = string_field(frame, "q");
            auto s = poet_step(*session_, SendPremise{p, q, now()}, *agent_);
            s = poet_step(s, AgentAnswer{}, *agent_, agent_clock);
            const auto& answer = s.current()->transcript().messages.back();
            session_ = std::move(s);
            return {json{{"t", "answer"}, {"r", std::get<std::string>(answer.payload)}, {"ts", answer.timestamp.millis()}}
                        .dump()};
        }
        if (type == "reveal") {
            const auto& rp = string_field(frame, "rp");
            auto s = poet_step(*session_, SendReveal{rp, now()}, *agent_);
            s = poet_step(s, AgentEmotion{}, *agent_, agent_clock);
            const auto report = reported_emotion(s.rounds().back());
            session_ = std::move(s);
            return {json{{"t", "emotion"}, {"e", report.label}, {"pi", report.pi}}.dump()};
        }
        if (type == "next") {
            session_ = poet_step(*session_, NextRound{now()}, *agent_);
            return {json{{"t", "next"}}.dump()};
        }
        if (type == "verdict") {
            const Verdict v = verdict_from_string(string_field(frame, "v"));
            session_ = poet_step(*session_, RequestVerdict{v, now()}, *agent_);
            persist();
            return {json{{"t", "verdict"}, {"v", to_string(v)}}.dump()};
        }
        return {json{{"t", "export"}, {"session", session_->id()}, {"ndjson", export_ndjson(*session_)}}.dump()};
    } catch (const std::exception& e) {
        return {error_frame(e.what())};
    }
}

struct PoetServer::Impl {
    struct Connection {
        std::shared_ptr<net::LineStream> stream;
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };

    Impl(const net::Endpoint& bind, std::shared_ptr<ServerContext> ctx) : listener(bind), context(std::move(ctx)) {}

    void run()
    {
        while (!stopping.load()) {
            auto accepted = listener.accept(std::chrono::milliseconds(50));
            reap(false);
            if (!accepted) {
                continue;
            }
            auto stream = std::make_shared<net::LineStream>(std::move(*accepted));
            auto done = std::make_shared<std::atomic<bool>>(false);
            std::lock_guard lock(mutex);
            if (stopping.load()) {
                break;
            }
            connections.push_back({stream, std::thread([this, stream, done] {
                                       serve(*stream);
                                       done->store(true);
                                   }),
                                   done});
        }
    }

    void serve(net::LineStream& stream)
    {
        ConnectionHandler handler(context);
        try {
            while (auto line = stream.read_line()) {
                if (line->empty()) {
                    continue;
                }
                for (const auto& reply : handler.handle_line(*line)) {
                    stream.write_line(reply);
                }
            }
        } catch (const std::exception&) {
            // Peer went away or sent an oversized line.
        }
        handler.finish();
    }

    void reap(bool all)
    {
        std::list<Connection> finished;
        {
            std::lock_guard lock(mutex);
            for (auto it = connections.begin(); it != connections.end();) {
                if (all || it->done->load()) {
                    if (all) {
                        it->stream->shutdown();
                    }
                    finished.splice(finished.end(), connections, it++);
                } else {
                    ++it;
                }
            }
        }
        for (auto& c : finished) {
            if (c.thread.joinable()) {
                c.thread.join();
            }
        }
    }

    net::TcpListener listener;
    std::shared_ptr<ServerContext> context;
    std::atomic<bool> stopping{false};
    std::mutex mutex;
    std::list<Connection> connections;
    std::thread acceptor;
};

PoetServer::PoetServer(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

std::unique_ptr<PoetServer> PoetServer::start(const net::Endpoint& bind, std::shared_ptr<ServerContext> context)
{
    auto impl = std::make_unique<Impl>(bind, std::move(context));
    impl->acceptor = std::thread([raw = impl.get()] { raw->run(); });
    return std::unique_ptr<PoetServer>(new PoetServer(std::move(impl)));
}

PoetServer::~PoetServer()
{
    stop();
}

std::uint16_t PoetServer::port() const noexcept
{
    return impl_->listener.port();
}

void PoetServer::stop()
{
    if (!impl_ || impl_->stopping.exchange(true)) {
        return;
    }
    if (impl_->acceptor.joinable()) {
        impl_->acceptor.join();
    }
    impl_->reap(true);
}

void serve_stdio(std::istream& in, std::ostream& out, std::shared_ptr<ServerContext> context)
{
    ConnectionHandler handler(std::move(context));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        for (const auto& reply : handler.handle_line(line)) {
            out << reply << '\n';
        }
        out.flush();
    }
    handler.finish();
}

RemoteAgent::RemoteAgent(net::Endpoint endpoint, std::optional<std::string> agent_name)
    : endpoint_(std::move(endpoint)), agent_name_(std::move(agent_name))
{
}

std::string RemoteAgent::exchange(const std::string& frame, std::string_view expected)
{
    if (!stream_) {
        throw Error(Errc::out_of_order, "remote agent is not negotiated");
    }
    stream_->write_line(frame);
    auto line = stream_->read_line();
    if (!line) {
        throw Error(Errc::io_error, "remote agent closed the connection");
    }
    const json reply = detail::parse_json(*line, "remote agent reply");
    const auto type = reply.value("t", std::string());
    if (type == "error") {
        throw Error(Errc::not_allowed, "remote agent: " + reply.value("msg", std::string("error")));
    }
    if (type != expected) {
        throw Error(Errc::parse_error, fmt::format("remote agent sent '{}' where '{}' was expected", type, expected));
    }
    return *line;
}

bool RemoteAgent::covers(const std::set<std::string>& proposal)
{
    stream_ = net::connect_tcp(endpoint_);
    json hello{{"t", "hello"}, {"emotions", proposal}};
    if (agent_name_) {
        hello["agent"] = *agent_name_;
    }
    stream_->write_line(hello.dump());
    auto line = stream_->read_line();
    if (!line) {
        throw Error(Errc::io_error, "remote agent closed the connection");
    }
    const json reply = detail::parse_json(*line, "remote agent reply");
    const auto type = reply.value("t", std::string());
    if (type == "agreed") {
        return true;
    }
    if (type == "inconclusive") {
        return false;
    }
    throw Error(Errc::not_allowed, "remote agent refused hello: " + reply.value("msg", type));
}

std::string RemoteAgent::answer(const std::string& premise, const std::string& question)
{
    const auto line = exchange(json{{"t", "premise"}, {"p", premise}, {"q", question}}.dump(), "answer");
    return detail::with_parse_errors("remote answer", [&] { return json::parse(line).at("r").get<std::string>(); });
}

EmotionReport RemoteAgent::report(const std::string&, const std::string&, const std::string&, const std::string& reveal)
{
    const auto line = exchange(json{{"t", "reveal"}, {"rp", reveal}}.dump(), "emotion");
    return detail::with_parse_errors("remote emotion", [&] {
        const auto f = json::parse(line);
        return EmotionReport{f.at("e").get<std::string>(), f.at("pi").get<double>()};
    });
}

void RemoteAgent::next_round()
{
    exchange(json{{"t", "next"}}.dump(), "next");
}

}  // namespace aporia::poet
