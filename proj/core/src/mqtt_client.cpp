#include "storetwin/mqtt/client.hpp"

#include <system_error>

#include "net.hpp"

namespace storetwin::mqtt {

using Clock = std::chrono::steady_clock;

struct MqttClient::Impl {
    net::Socket sock;
    bool open = false;
    Bytes buffer;
    std::deque<Packet> pending;
    std::uint16_t next_id = 1;

    std::uint16_t take_id() {
        const auto id = next_id;
        next_id = next_id == 0xFFFF ? 1 : static_cast<std::uint16_t>(id + 1);
        return id;
    }

    void send(const Bytes& bytes) {
        if (!open) throw SessionClosedError("mqtt session is closed");
        if (!net::send_all(sock, bytes)) {
            close();
            throw SessionClosedError("mqtt session dropped while sending");
        }
    }

    void close() {
        open = false;
        sock.reset();
    }

    /// Reads one packet off the wire, or nullopt on timeout / close.
    std::optional<Packet> read_packet(Clock::time_point deadline) {
        while (open) {
            const auto res = decode_packet(buffer);
            if (res.status == DecodeStatus::Ok) {
                buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(res.consumed));
                if (const auto* pub = std::get_if<Publish>(&*res.packet); pub && pub->qos == 1)
                    send(encode_packet(Puback{*pub->packet_id}));
                return res.packet;
            }
            if (res.status == DecodeStatus::Malformed) {
                close();
                return std::nullopt;
            }
            const auto now = Clock::now();
            if (now >= deadline) return std::nullopt;
            const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
            const auto ready = net::wait_readable(sock, wait);
            if (ready == net::WaitResult::Timeout) continue;
            if (ready == net::WaitResult::Error) {
                close();
                return std::nullopt;
            }
            std::uint8_t chunk[4096];
            const long n = net::recv_some(sock, chunk);
            if (n <= 0) {
                close();
                return std::nullopt;
            }
            buffer.insert(buffer.end(), chunk, chunk + n);
        }
        return std::nullopt;
    }
};

MqttClient::MqttClient(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
MqttClient::MqttClient(MqttClient&&) noexcept = default;
MqttClient& MqttClient::operator=(MqttClient&&) noexcept = default;
MqttClient::~MqttClient() = default;

MqttClient MqttClient::connect(const std::string& host, std::uint16_t port, const Connect& params,
                               Timeout timeout) {
    auto impl = std::make_unique<Impl>();
    try {
        impl->sock = net::connect_tcp(host, port, timeout);
    } catch (const std::system_error& e) {
        throw SessionClosedError(e.what());
    }
    impl->open = true;
    MqttClient client(std::move(impl));
    client.send_packet(params);
    auto ack = client.await([](const Packet& p) { return std::holds_alternative<Connack>(p); },
                            timeout);
    if (!ack) throw SessionClosedError("no CONNACK from broker");
    if (std::get<Connack>(*ack).return_code != ConnectReturnCode::Accepted) {
        client.impl_->close();
        throw SessionClosedError("broker refused connection");
    }
    return client;
}

bool MqttClient::connected() const noexcept { return impl_ && impl_->open; }

template <class Pred>
std::optional<Packet> MqttClient::await(Pred pred, Timeout timeout) {
    const auto deadline = Clock::now() + timeout;
    while (true) {
        auto p = impl_->read_packet(deadline);
        if (!p) return std::nullopt;
        if (pred(*p)) return p;
        impl_->pending.push_back(std::move(*p));
    }
}

void MqttClient::publish(const std::string& topic, const Bytes& payload, bool retain) {
    send_packet(Publish{topic, payload, 0, retain, false, std::nullopt});
}

std::uint16_t MqttClient::publish_qos1(const std::string& topic, const Bytes& payload,
                                       Timeout timeout) {
    if (!connected()) throw SessionClosedError("mqtt session is closed");
    const auto id = impl_->take_id();
    send_packet(Publish{topic, payload, 1, false, false, id});
    auto ack = await(
        [id](const Packet& p) {
            const auto* a = std::get_if<Puback>(&p);
            return a != nullptr && a->packet_id == id;
        },
        timeout);
    if (!ack) throw SessionClosedError("no PUBACK for packet " + std::to_string(id));
    return id;
}

Suback MqttClient::subscribe(const std::vector<Subscription>& subs, Timeout timeout) {
    if (!connected()) throw SessionClosedError("mqtt session is closed");
    const auto id = impl_->take_id();
    send_packet(Subscribe{id, subs});
    auto ack = await(
        [id](const Packet& p) {
            const auto* a = std::get_if<Suback>(&p);
            return a != nullptr && a->packet_id == id;
        },
        timeout);
    if (!ack) throw SessionClosedError("no SUBACK for packet " + std::to_string(id));
    return std::get<Suback>(*ack);
}

bool MqttClient::ping(Timeout timeout) {
    send_packet(Pingreq{});
    return await([](const Packet& p) { return std::holds_alternative<Pingresp>(p); }, timeout)
        .has_value();
}

std::optional<Packet> MqttClient::receive(Timeout timeout) {
    if (!impl_->pending.empty()) {
        Packet p = std::move(impl_->pending.front());
        impl_->pending.pop_front();
        return p;
    }
    return impl_->read_packet(Clock::now() + timeout);
}

void MqttClient::send_packet(const Packet& p) { impl_->send(encode_packet(p)); }

void MqttClient::send_bytes(const Bytes& bytes) { impl_->send(bytes); }

void MqttClient::disconnect() {
    if (!connected()) return;
    try {
        send_packet(Disconnect{});
    } catch (const SessionClosedError&) {
    }
    impl_->close();
}

}  // namespace storetwin::mqtt
