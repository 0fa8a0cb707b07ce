#include "storetwin/telemetry.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>

#include "storetwin/error.hpp"

namespace storetwin::telemetry {

namespace {

double parse_number(std::string_view text, std::string_view field) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw ValidationError("telemetry payload: bad " + std::string(field) + " '" +
                              std::string(text) + "'");
    return v;
}

std::string_view expect_prefix(std::string_view token, std::string_view prefix) {
    if (token.substr(0, prefix.size()) != prefix)
        throw ValidationError("telemetry payload: expected '" + std::string(prefix) + "'");
    return token.substr(prefix.size());
}

}  // namespace

std::string to_payload(const TelemetrySample& s) {
    return fmt::format("t={:.{}f} v={:.{}f} ok={}", s.t_s, kTimePrecision, s.value,
                       kValuePrecision, s.ok ? 1 : 0);
}

TelemetrySample parse_payload(std::string_view payload, std::string channel) {
    const auto sp1 = payload.find(' ');
    const auto sp2 = sp1 == std::string_view::npos ? sp1 : payload.find(' ', sp1 + 1);
    if (sp2 == std::string_view::npos || payload.find(' ', sp2 + 1) != std::string_view::npos)
        throw ValidationError("telemetry payload: expected 't=.. v=.. ok=..'");

    TelemetrySample s;
    s.channel = std::move(channel);
    s.t_s = parse_number(expect_prefix(payload.substr(0, sp1), "t="), "t");
    s.value = parse_number(expect_prefix(payload.substr(sp1 + 1, sp2 - sp1 - 1), "v="), "v");
    const auto ok = expect_prefix(payload.substr(sp2 + 1), "ok=");
    if (ok != "0" && ok != "1") throw ValidationError("telemetry payload: ok must be 0 or 1");
    s.ok = ok == "1";
    return s;
}

std::string sensor_topic(std::string_view store_id, sensing::Channel channel) {
    std::string_view name = "temp";
    switch (channel) {
        case sensing::Channel::Temp: name = "temp"; break;
        case sensing::Channel::Rh: name = "rh"; break;
        case sensing::Channel::Gas: name = "gas"; break;
    }
    return fmt::format("store/{}/sensor/{}", store_id, name);
}

std::string relay_topic(std::string_view store_id, control::Actuator actuator) {
    return fmt::format("store/{}/relay/{}", store_id, control::to_string(actuator));
}

std::string alarm_topic(std::string_view store_id) {
    return fmt::format("store/{}/alarm", store_id);
}

void publish_sample(mqtt::MqttClient& session, const std::string& topic,
                    const TelemetrySample& sample) {
    const std::string text = to_payload(sample);
    session.publish(topic, mqtt::Bytes(text.begin(), text.end()));
}

TelemetryPublisher::TelemetryPublisher(std::string host, std::uint16_t port,
                                       std::string client_id, std::size_t capacity)
    : host_(std::move(host)), port_(port), client_id_(std::move(client_id)),
      capacity_(std::max<std::size_t>(1, capacity)) {
    worker_ = std::thread([this] { run(); });
}

TelemetryPublisher::~TelemetryPublisher() { close(); }

void TelemetryPublisher::enqueue(std::string topic, TelemetrySample sample) {
    {
        std::lock_guard lock(mu_);
        if (closing_) return;
        if (queue_.size() >= capacity_) {
            queue_.pop_front();
            ++dropped_;
        }
        queue_.emplace_back(std::move(topic), std::move(sample));
    }
    cv_.notify_one();
}

void TelemetryPublisher::close() {
    {
        std::lock_guard lock(mu_);
        closing_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

std::uint64_t TelemetryPublisher::dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
}

std::uint64_t TelemetryPublisher::sent() const {
    std::lock_guard lock(mu_);
    return sent_;
}

std::optional<std::string> TelemetryPublisher::error() const {
    std::lock_guard lock(mu_);
    return error_;
}

void TelemetryPublisher::run() {
    std::optional<mqtt::MqttClient> client;
    try {
        mqtt::Connect params;
        params.client_id = client_id_;
        params.keep_alive_s = 60;
        client = mqtt::MqttClient::connect(host_, port_, params);
    } catch (const std::exception& e) {
        std::lock_guard lock(mu_);
        error_ = e.what();
    }

    while (true) {
        std::pair<std::string, TelemetrySample> item;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [&] { return !queue_.empty() || closing_; });
            if (queue_.empty()) break;
            item = std::move(queue_.front());
            queue_.pop_front();
            if (!client) {
                ++dropped_;
                continue;
            }
        }
        try {
            publish_sample(*client, item.first, item.second);
            std::lock_guard lock(mu_);
            ++sent_;
        } catch (const std::exception& e) {
            std::lock_guard lock(mu_);
            error_ = e.what();
            ++dropped_;
            client.reset();
        }
    }
    if (client) client->disconnect();
}

}  // namespace storetwin::telemetry
