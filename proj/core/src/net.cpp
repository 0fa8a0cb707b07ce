#include "net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <system_error>

namespace storetwin::net {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw std::system_error(errno, std::generic_category(), what);
}

}  // namespace

Socket::~Socket() { reset(); }

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        reset();
        fd_ = other.release();
    }
    return *this;
}

void Socket::reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::shutdown() const noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket listen_tcp(const std::string& address, std::uint16_t port, int backlog) {
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw_errno("socket");
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1)
        throw std::system_error(EINVAL, std::generic_category(), "bad bind address " + address);
    if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw_errno("bind " + address + ":" + std::to_string(port));
    if (::listen(s.fd(), backlog) != 0) throw_errno("listen");
    return s;
}

std::uint16_t local_port(const Socket& s) {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        throw_errno("getsockname");
    return ntohs(addr.sin_port);
}

Socket connect_tcp(const std::string& host, std::uint16_t port,
                   std::chrono::milliseconds timeout) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
        throw std::system_error(EHOSTUNREACH, std::generic_category(),
                                "resolve " + host + ": " + ::gai_strerror(rc));

    int last_errno = ECONNREFUSED;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) {
            last_errno = errno;
            continue;
        }
        const int flags = ::fcntl(s.fd(), F_GETFL, 0);
        ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd pfd{s.fd(), POLLOUT, 0};
            rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
            if (rc == 1) {
                int err = 0;
                socklen_t len = sizeof(err);
                ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
                rc = err == 0 ? 0 : -1;
                errno = err;
            } else {
                rc = -1;
                errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            ::fcntl(s.fd(), F_SETFL, flags);
            int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            ::freeaddrinfo(res);
            return s;
        }
        last_errno = errno;
    }
    ::freeaddrinfo(res);
    throw std::system_error(last_errno, std::generic_category(),
                            "connect " + host + ":" + service);
}

WaitResult wait_readable(const Socket& s, std::chrono::milliseconds timeout) {
    pollfd pfd{s.fd(), POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::max<long long>(0, timeout.count())));
    if (rc == 0) return WaitResult::Timeout;
    if (rc < 0) return errno == EINTR ? WaitResult::Timeout : WaitResult::Error;
    return WaitResult::Ready;
}

bool send_all(const Socket& s, std::span<const std::uint8_t> data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(s.fd(), data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

long recv_some(const Socket& s, std::span<std::uint8_t> buf) {
    while (true) {
        const ssize_t n = ::recv(s.fd(), buf.data(), buf.size(), 0);
        if (n < 0 && errno == EINTR) continue;
        return static_cast<long>(n);
    }
}

}  // namespace storetwin::net
