#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

namespace storetwin::mqtt {

struct BrokerOptions {
    std::string bind_address = "127.0.0.1";
    std::uint16_t port = 1883;  // 0 picks an ephemeral port
    std::size_t max_queue_per_client = 1024;
    double connect_timeout_s = 10.0;
};

struct BrokerStats {
    std::uint64_t connections_accepted = 0;
    std::uint64_t publishes_received = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t messages_dropped = 0;
    std::uint64_t keepalive_expiries = 0;
    std::uint64_t protocol_errors = 0;
};

/// In-process MQTT 3.1.1 broker over TCP.
///
/// Each connection gets a reader thread (packet handling, keep-alive) and a
/// writer thread draining a bounded outbound queue; when the queue is full
/// the oldest qos 0 message is dropped. Sessions are never persisted: a
/// clean session is assumed for every client. A second CONNECT with a live
/// client id closes the older session. A client that stays silent for 1.5x
/// its keep-alive is disconnected.
class Broker {
public:
    explicit Broker(BrokerOptions options = {});
    ~Broker();
    Broker(const Broker&) = delete;
    Broker& operator=(const Broker&) = delete;

    /// Binds the listener and serves on a background thread.
    void start();
    /// Binds (if needed) and serves on the calling thread until stop().
    void serve();
    /// Closes the listener and every session; joins all threads.
    void stop();

    /// Bound port; valid after start()/serve() has bound the listener.
    [[nodiscard]] std::uint16_t port() const;
    [[nodiscard]] std::size_t session_count() const;
    [[nodiscard]] BrokerStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace storetwin::mqtt
