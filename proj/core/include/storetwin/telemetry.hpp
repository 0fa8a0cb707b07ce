#pragma once

/**
 * @file telemetry.hpp
 * @brief Telemetry payloads, topic naming, and the background publisher.
 *
 * Topics:
 *   store/<id>/sensor/{temp,rh,gas}
 *   store/<id>/relay/{fan,dehumidifier,cooler,uvc}
 *   store/<id>/alarm
 * Payload (UTF-8): `t=<seconds> v=<value> ok=<0|1>`.
 */

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "storetwin/control.hpp"
#include "storetwin/mqtt/client.hpp"
#include "storetwin/sensing.hpp"

namespace storetwin::telemetry {

struct TelemetrySample {
    double t_s = 0.0;
    std::string channel;
    double value = 0.0;
    bool ok = true;

    bool operator==(const TelemetrySample&) const = default;
};

inline constexpr int kTimePrecision = 3;
inline constexpr int kValuePrecision = 4;

/// `t=<t_s> v=<value> ok=<0|1>` with fixed precision.
std::string to_payload(const TelemetrySample& sample);

/// Parses a payload produced by to_payload; the channel is supplied by the caller
/// (it travels in the topic). Throws ValidationError on malformed text.
TelemetrySample parse_payload(std::string_view payload, std::string channel = {});

std::string sensor_topic(std::string_view store_id, sensing::Channel channel);
std::string relay_topic(std::string_view store_id, control::Actuator actuator);
std::string alarm_topic(std::string_view store_id);

/// Serializes the sample and sends it as a qos 0 PUBLISH. Throws
/// SessionClosedError when the session is gone.
void publish_sample(mqtt::MqttClient& session, const std::string& topic,
                    const TelemetrySample& sample);

/// Decoupled outbound path for the simulation loop. `enqueue` never blocks;
/// when the bounded queue is full the oldest sample is dropped and counted.
class TelemetryPublisher {
public:
    TelemetryPublisher(std::string host, std::uint16_t port, std::string client_id,
                       std::size_t capacity = 4096);
    ~TelemetryPublisher();
    TelemetryPublisher(const TelemetryPublisher&) = delete;
    TelemetryPublisher& operator=(const TelemetryPublisher&) = delete;

    void enqueue(std::string topic, TelemetrySample sample);
    /// Drains the queue (bounded wait) and disconnects.
    void close();

    [[nodiscard]] std::uint64_t dropped() const;
    [[nodiscard]] std::uint64_t sent() const;
    [[nodiscard]] std::optional<std::string> error() const;

private:
    void run();

    std::string host_;
    std::uint16_t port_;
    std::string client_id_;
    std::size_t capacity_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::pair<std::string, TelemetrySample>> queue_;
    bool closing_ = false;
    std::uint64_t dropped_ = 0;
    std::uint64_t sent_ = 0;
    std::optional<std::string> error_;
    std::thread worker_;
};

}  // namespace storetwin::telemetry
