#include "aporia/line_socket.hpp"

#include "aporia/error.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace aporia::net {

namespace {

std::string errno_text()
{
    return std::strerror(errno);
}

struct AddrInfo {
    addrinfo* list = nullptr;
    ~AddrInfo()
    {
        if (list) freeaddrinfo(list);
    }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    const auto port = std::to_string(ep.port);
    const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
    if (int rc = getaddrinfo(host, port.c_str(), &hints, &out.list); rc != 0) {
        throw Error(Errc::io_error, fmt::format("cannot resolve {}:{}: {}", ep.host, ep.port, gai_strerror(rc)));
    }
}

}  // namespace

Endpoint parse_endpoint(std::string_view text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
        throw Error(Errc::invalid_argument, fmt::format("address '{}' must be host:port", text));
    }
    Endpoint ep;
    ep.host = std::string(text.substr(0, colon));
    if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') {
        ep.host = ep.host.substr(1, ep.host.size() - 2);
    }
    const auto port = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), ep.port);
    if (port.empty() || ec != std::errc{} || ptr != port.data() + port.size()) {
        throw Error(Errc::invalid_argument, fmt::format("bad port in '{}'", text));
    }
    return ep;
}

LineStream::~LineStream()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

LineStream::LineStream(LineStream&& other) noexcept : fd_(other.fd_), buffer_(std::move(other.buffer_))
{
    other.fd_ = -1;
}

LineStream& LineStream::operator=(LineStream&& other) noexcept
{
    if (this != &other) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = other.fd_;
        buffer_ = std::move(other.buffer_);
        other.fd_ = -1;
    }
    return *this;
}

std::optional<std::string> LineStream::read_line()
{
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            return line;
        }
        if (buffer_.size() > max_line_bytes) {
            throw Error(Errc::io_error, "line exceeds the frame size limit");
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (errno == ECONNRESET || errno == EBADF || errno == ENOTCONN) {
                return std::nullopt;
            }
            throw Error(Errc::io_error, "recv: " + errno_text());
        }
        if (n == 0) {
            if (buffer_.empty()) {
                return std::nullopt;
            }
            std::string rest = std::move(buffer_);
            buffer_.clear();
            return rest;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

void LineStream::write_line(std::string_view line)
{
    std::string data(line);
    data += '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw Error(Errc::io_error, "send: " + errno_text());
        }
        sent += static_cast<std::size_t>(n);
    }
}

void LineStream::shutdown() noexcept
{
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
    }
}

LineStream connect_tcp(const Endpoint& endpoint)
{
    AddrInfo info;
    resolve(endpoint, false, info);
    std::string last_error = "no address";
    for (auto* ai = info.list; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text();
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return LineStream(fd);
        }
        last_error = errno_text();
        ::close(fd);
    }
    throw Error(Errc::io_error, fmt::format("cannot connect to {}:{}: {}", endpoint.host, endpoint.port, last_error));
}

TcpListener::TcpListener(const Endpoint& endpoint)
{
    AddrInfo info;
    resolve(endpoint, true, info);
    std::string last_error = "no address";
    for (auto* ai = info.list; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text();
            continue;
        }
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            fd_ = fd;
            break;
        }
        last_error = errno_text();
        ::close(fd);
    }
    if (fd_ < 0) {
        throw Error(Errc::io_error, fmt::format("cannot bind {}:{}: {}", endpoint.host, endpoint.port, last_error));
    }
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET) {
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else {
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
}

TcpListener::~TcpListener()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

std::optional<LineStream> TcpListener::accept(std::chrono::milliseconds timeout)
{
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) {
        return std::nullopt;
    }
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
        return std::nullopt;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineStream(fd);
}

}  // namespace aporia::net
