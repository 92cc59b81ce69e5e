#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aporia::net {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

// "host:port"; port 0 asks for an ephemeral port when binding.
Endpoint parse_endpoint(std::string_view text);

inline constexpr std::size_t max_line_bytes = 1 << 20;

// Newline-delimited text over a stream socket. Owns the descriptor.
class LineStream {
public:
    explicit LineStream(int fd) noexcept : fd_(fd) {}
    ~LineStream();

    LineStream(LineStream&& other) noexcept;
    LineStream& operator=(LineStream&& other) noexcept;
    LineStream(const LineStream&) = delete;
    LineStream& operator=(const LineStream&) = delete;

    // Next line without its terminator; nullopt at end of stream. A line over
    // max_line_bytes throws.
    std::optional<std::string> read_line();
    void write_line(std::string_view line);

    // Wakes a blocked reader on another thread.
    void shutdown() noexcept;
    int fd() const noexcept { return fd_; }

private:
    int fd_ = -1;
    std::string buffer_;
};

LineStream connect_tcp(const Endpoint& endpoint);

class TcpListener {
public:
    explicit TcpListener(const Endpoint& endpoint);
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    // Waits up to `timeout` for a client.
    std::optional<LineStream> accept(std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

}  // namespace aporia::net
