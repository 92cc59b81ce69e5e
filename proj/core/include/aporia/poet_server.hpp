#pragma once

#include "aporia/line_socket.hpp"
#include "aporia/poet.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aporia::poet {

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

// Named agent factories. The first one added is the default. Read-only once
// the server starts.
class AgentRegistry {
public:
    AgentRegistry& add(std::string name, AgentFactory factory);

    // nullopt picks the default agent.
    std::unique_ptr<Agent> create(const std::optional<std::string>& name) const;
    std::vector<std::string> names() const;
    bool empty() const noexcept { return factories_.empty(); }

private:
    std::map<std::string, AgentFactory> factories_;
    std::string default_;
};

struct ServerOptions {
    // Closed sessions are written to <dir>/<session>.ndjson.
    std::optional<std::filesystem::path> export_dir;
};

// State shared by every connection of one server.
class ServerContext {
public:
    ServerContext(std::shared_ptr<const AgentRegistry> agents, ServerOptions options = {});

    const AgentRegistry& agents() const noexcept { return *agents_; }
    const ServerOptions& options() const noexcept { return options_; }
    std::string next_session_id();

private:
    std::shared_ptr<const AgentRegistry> agents_;
    ServerOptions options_;
    std::atomic<std::uint64_t> counter_{0};
};

// Milliseconds on a monotonic clock.
using MillisClock = std::function<std::int64_t()>;
std::int64_t steady_millis();

// Drives one PoET session from wire frames. Every reply frame is returned in
// order; a rejected frame yields one error frame and leaves the session as it was.
class ConnectionHandler {
public:
    explicit ConnectionHandler(std::shared_ptr<ServerContext> context, MillisClock clock = steady_millis);

    std::vector<std::string> handle_line(std::string_view line);

    // Writes the export file for a started session, if configured.
    void finish();

    const std::optional<PoetSession>& session() const noexcept { return session_; }

private:
    Timestamp now() const;
    void persist() const;

    std::shared_ptr<ServerContext> context_;
    MillisClock clock_;
    std::int64_t start_ms_ = 0;
    std::unique_ptr<Agent> agent_;
    std::optional<PoetSession> session_;
};

std::string error_frame(std::string_view message);

// Accepts connections on a background thread; one thread per connection.
class PoetServer {
public:
    static std::unique_ptr<PoetServer> start(const net::Endpoint& bind, std::shared_ptr<ServerContext> context);
    ~PoetServer();

    PoetServer(const PoetServer&) = delete;
    PoetServer& operator=(const PoetServer&) = delete;

    std::uint16_t port() const noexcept;
    void stop();

private:
    struct Impl;
    explicit PoetServer(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

// One session over a pair of streams, e.g. standard input and output.
void serve_stdio(std::istream& in, std::ostream& out, std::shared_ptr<ServerContext> context);

// Agent living behind another PoET server, spoken to over the same wire
// protocol.
class RemoteAgent final : public Agent {
public:
    explicit RemoteAgent(net::Endpoint endpoint, std::optional<std::string> agent_name = std::nullopt);

    std::string kind() const override { return "remote"; }
    bool covers(const std::set<std::string>& proposal) override;
    std::string answer(const std::string& premise, const std::string& question) override;
    EmotionReport report(const std::string& premise,
                         const std::string& question,
                         const std::string& answer,
                         const std::string& reveal) override;
    void next_round() override;

private:
    std::string exchange(const std::string& frame, std::string_view expected);

    net::Endpoint endpoint_;
    std::optional<std::string> agent_name_;
    std::optional<net::LineStream> stream_;
};

}  // namespace aporia::poet
