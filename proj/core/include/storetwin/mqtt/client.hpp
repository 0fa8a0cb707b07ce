#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "storetwin/mqtt/codec.hpp"

namespace storetwin::mqtt {

/// Raised for operations on a session that is closed or was dropped by the peer.
class SessionClosedError : public std::runtime_error {
public:
    explicit SessionClosedError(const std::string& what) : std::runtime_error(what) {}
};

/// Blocking single-threaded MQTT 3.1.1 client.
class MqttClient {
public:
    using Timeout = std::chrono::milliseconds;

    /// Connects and waits for CONNACK. Throws SessionClosedError when the
    /// broker refuses or is unreachable.
    static MqttClient connect(const std::string& host, std::uint16_t port, const Connect& params,
                              Timeout timeout = Timeout{5000});

    MqttClient(MqttClient&&) noexcept;
    MqttClient& operator=(MqttClient&&) noexcept;
    ~MqttClient();

    [[nodiscard]] bool connected() const noexcept;

    /// qos 0 publish.
    void publish(const std::string& topic, const Bytes& payload, bool retain = false);
    /// qos 1 publish; waits for the matching PUBACK and returns its packet id.
    std::uint16_t publish_qos1(const std::string& topic, const Bytes& payload,
                               Timeout timeout = Timeout{5000});

    Suback subscribe(const std::vector<Subscription>& subs, Timeout timeout = Timeout{5000});

    /// Sends PINGREQ and waits for PINGRESP.
    bool ping(Timeout timeout = Timeout{5000});

    /// Next inbound packet, or nullopt on timeout / closed session. qos 1
    /// publishes are acknowledged automatically.
    std::optional<Packet> receive(Timeout timeout);

    /// Raw access for protocol tests.
    void send_packet(const Packet& p);
    void send_bytes(const Bytes& bytes);

    void disconnect();

private:
    struct Impl;
    explicit MqttClient(std::unique_ptr<Impl> impl);

    template <class Pred>
    std::optional<Packet> await(Pred pred, Timeout timeout);

    std::unique_ptr<Impl> impl_;
};

}  // namespace storetwin::mqtt
