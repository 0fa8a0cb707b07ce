#pragma once

// POSIX socket plumbing shared by the broker and the client. Internal.

#include <chrono>
#include <cstdint>
#include <span>
#include <string>

namespace storetwin::net {

/// Owning file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept : fd_(other.release()) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    [[nodiscard]] int fd() const noexcept { return fd_; }
    [[nodiscard]] bool valid() const noexcept { return fd_ >= 0; }
    int release() noexcept {
        const int fd = fd_;
        fd_ = -1;
        return fd;
    }
    void reset() noexcept;
    /// Wakes any thread blocked on this socket without releasing the descriptor.
    void shutdown() const noexcept;

private:
    int fd_ = -1;
};

/// Binds and listens; port 0 picks an ephemeral port. Throws std::system_error.
Socket listen_tcp(const std::string& address, std::uint16_t port, int backlog = 64);
std::uint16_t local_port(const Socket& s);

/// Connects with a timeout. Throws std::system_error.
Socket connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

enum class WaitResult { Ready, Timeout, Error };
WaitResult wait_readable(const Socket& s, std::chrono::milliseconds timeout);

/// Sends the whole buffer. Returns false on a broken connection.
bool send_all(const Socket& s, std::span<const std::uint8_t> data);

/// One recv call. Returns bytes read, 0 on orderly close, -1 on error.
long recv_some(const Socket& s, std::span<std::uint8_t> buf);

}  // namespace storetwin::net
