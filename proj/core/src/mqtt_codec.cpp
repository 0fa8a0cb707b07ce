#include "storetwin/mqtt/codec.hpp"

#include <string_view>

#include "storetwin/error.hpp"
#include "storetwin/mqtt/topic.hpp"

namespace storetwin::mqtt {

namespace {

constexpr std::uint8_t kProtocolLevel = 4;
constexpr std::string_view kProtocolName = "MQTT";

// ---------------------------------------------------------------- encoding

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    void binary(std::span<const std::uint8_t> data) {
        if (data.size() > 0xFFFF) throw ValidationError("mqtt: field longer than 65535 bytes");
        u16(static_cast<std::uint16_t>(data.size()));
        out_.insert(out_.end(), data.begin(), data.end());
    }
    void string(std::string_view s) {
        if (!is_valid_mqtt_string(s)) throw ValidationError("mqtt: invalid UTF-8 string field");
        binary({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    }
    void raw(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

Bytes frame(std::uint8_t first_byte, const Bytes& body) {
    if (body.size() > kMaxRemainingLength) throw ValidationError("mqtt: packet too large");
    Bytes out;
    const Bytes len = encode_remaining_length(static_cast<std::uint32_t>(body.size()));
    out.reserve(1 + len.size() + body.size());
    out.push_back(first_byte);
    out.insert(out.end(), len.begin(), len.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

void require_packet_id(std::uint16_t id) {
    if (id == 0) throw ValidationError("mqtt: packet identifier must be non-zero");
}

Bytes encode(const Connect& p) {
    if (p.password && !p.username) throw ValidationError("mqtt: password requires a username");
    Writer w;
    w.string(kProtocolName);
    w.u8(kProtocolLevel);
    std::uint8_t flags = 0;
    if (p.clean_session) flags |= 0x02;
    if (p.will) {
        if (p.will->qos > 2) throw ValidationError("mqtt: will qos must be 0..2");
        if (!is_valid_topic_name(p.will->topic)) throw ValidationError("mqtt: invalid will topic");
        flags |= 0x04;
        flags |= static_cast<std::uint8_t>(p.will->qos << 3);
        if (p.will->retain) flags |= 0x20;
    }
    if (p.password) flags |= 0x40;
    if (p.username) flags |= 0x80;
    w.u8(flags);
    w.u16(p.keep_alive_s);
    w.string(p.client_id);
    if (p.will) {
        w.string(p.will->topic);
        w.binary(p.will->message);
    }
    if (p.username) w.string(*p.username);
    if (p.password) w.binary(*p.password);
    return frame(0x10, w.take());
}

Bytes encode(const Connack& p) {
    Writer w;
    w.u8(p.session_present ? 0x01 : 0x00);
    w.u8(static_cast<std::uint8_t>(p.return_code));
    return frame(0x20, w.take());
}

Bytes encode(const Publish& p) {
    if (!is_valid_topic_name(p.topic)) throw ValidationError("mqtt: invalid publish topic");
    if (p.qos > 1) throw ValidationError("mqtt: only qos 0 and 1 are supported");
    if (p.qos == 0 && (p.packet_id || p.dup))
        throw ValidationError("mqtt: qos 0 publish carries no packet id or dup flag");
    if (p.qos == 1) {
        if (!p.packet_id) throw ValidationError("mqtt: qos 1 publish needs a packet id");
        require_packet_id(*p.packet_id);
    }
    Writer w;
    w.string(p.topic);
    if (p.packet_id) w.u16(*p.packet_id);
    w.raw(p.payload);
    std::uint8_t first = 0x30;
    if (p.dup) first |= 0x08;
    first |= static_cast<std::uint8_t>(p.qos << 1);
    if (p.retain) first |= 0x01;
    return frame(first, w.take());
}

Bytes encode(const Puback& p) {
    require_packet_id(p.packet_id);
    Writer w;
    w.u16(p.packet_id);
    return frame(0x40, w.take());
}

Bytes encode(const Subscribe& p) {
    require_packet_id(p.packet_id);
    if (p.subscriptions.empty()) throw ValidationError("mqtt: subscribe needs a topic filter");
    Writer w;
    w.u16(p.packet_id);
    for (const auto& s : p.subscriptions) {
        if (!is_valid_topic_filter(s.filter)) throw ValidationError("mqtt: invalid topic filter");
        if (s.qos > 2) throw ValidationError("mqtt: requested qos must be 0..2");
        w.string(s.filter);
        w.u8(s.qos);
    }
    return frame(0x82, w.take());
}

Bytes encode(const Suback& p) {
    require_packet_id(p.packet_id);
    if (p.granted.empty()) throw ValidationError("mqtt: suback needs a return code");
    Writer w;
    w.u16(p.packet_id);
    for (auto g : p.granted) {
        if (g > 2 && g != kSubackFailure) throw ValidationError("mqtt: invalid suback code");
        w.u8(g);
    }
    return frame(0x90, w.take());
}

Bytes encode(const Unsubscribe& p) {
    require_packet_id(p.packet_id);
    if (p.filters.empty()) throw ValidationError("mqtt: unsubscribe needs a topic filter");
    Writer w;
    w.u16(p.packet_id);
    for (const auto& f : p.filters) {
        if (!is_valid_topic_filter(f)) throw ValidationError("mqtt: invalid topic filter");
        w.string(f);
    }
    return frame(0xA2, w.take());
}

Bytes encode(const Unsuback& p) {
    require_packet_id(p.packet_id);
    Writer w;
    w.u16(p.packet_id);
    return frame(0xB0, w.take());
}

Bytes encode(const Pingreq&) { return {0xC0, 0x00}; }
Bytes encode(const Pingresp&) { return {0xD0, 0x00}; }
Bytes encode(const Disconnect&) { return {0xE0, 0x00}; }

// ---------------------------------------------------------------- decoding

struct Malformed {
    std::string why;
};

/// Bounded cursor over the remaining-length window of one packet.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> body) : body_(body) {}

    [[nodiscard]] std::size_t remaining() const noexcept { return body_.size() - pos_; }
    [[nodiscard]] bool done() const noexcept { return pos_ == body_.size(); }

    std::uint8_t u8() {
        need(1);
        return body_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>((body_[pos_] << 8) | body_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    Bytes binary() {
        const std::size_t n = u16();
        need(n);
        Bytes out(body_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  body_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    std::string string() {
        const Bytes b = binary();
        std::string s(b.begin(), b.end());
        if (!is_valid_mqtt_string(s)) throw Malformed{"invalid UTF-8 string"};
        return s;
    }
    Bytes rest() {
        Bytes out(body_.begin() + static_cast<std::ptrdiff_t>(pos_), body_.end());
        pos_ = body_.size();
        return out;
    }
    std::uint16_t packet_id() {
        const auto id = u16();
        if (id == 0) throw Malformed{"zero packet identifier"};
        return id;
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw Malformed{"field runs past remaining length"};
    }

    std::span<const std::uint8_t> body_;
    std::size_t pos_ = 0;
};

void expect_flags(std::uint8_t flags, std::uint8_t wanted) {
    if (flags != wanted) throw Malformed{"invalid fixed header flags"};
}

void expect_done(const Reader& r) {
    if (!r.done()) throw Malformed{"trailing bytes in packet"};
}

Packet decode_connect(Reader& r) {
    if (r.string() != kProtocolName) throw Malformed{"unknown protocol name"};
    if (r.u8() != kProtocolLevel) throw Malformed{"unsupported protocol level"};
    const std::uint8_t flags = r.u8();
    if (flags & 0x01) throw Malformed{"reserved connect flag set"};
    const bool will_flag = flags & 0x04;
    const std::uint8_t will_qos = (flags >> 3) & 0x03;
    const bool will_retain = flags & 0x20;
    const bool has_password = flags & 0x40;
    const bool has_username = flags & 0x80;
    if (!will_flag && (will_qos != 0 || will_retain)) throw Malformed{"will flags without will"};
    if (will_qos == 3) throw Malformed{"will qos 3"};
    if (has_password && !has_username) throw Malformed{"password without username"};

    Connect c;
    c.clean_session = flags & 0x02;
    c.keep_alive_s = r.u16();
    c.client_id = r.string();
    if (will_flag) {
        Will w;
        w.topic = r.string();
        if (!is_valid_topic_name(w.topic)) throw Malformed{"invalid will topic"};
        w.message = r.binary();
        w.qos = will_qos;
        w.retain = will_retain;
        c.will = std::move(w);
    }
    if (has_username) c.username = r.string();
    if (has_password) c.password = r.binary();
    expect_done(r);
    return c;
}

Packet decode_publish(std::uint8_t flags, Reader& r) {
    Publish p;
    p.dup = flags & 0x08;
    p.qos = (flags >> 1) & 0x03;
    p.retain = flags & 0x01;
    if (p.qos == 3) throw Malformed{"publish qos 3"};
    if (p.qos == 2) throw Malformed{"qos 2 is not supported"};
    if (p.qos == 0 && p.dup) throw Malformed{"dup flag on qos 0 publish"};
    p.topic = r.string();
    if (!is_valid_topic_name(p.topic)) throw Malformed{"invalid publish topic"};
    if (p.qos == 1) p.packet_id = r.packet_id();
    p.payload = r.rest();
    return p;
}

Packet decode_subscribe(Reader& r) {
    Subscribe s;
    s.packet_id = r.packet_id();
    while (!r.done()) {
        Subscription sub;
        sub.filter = r.string();
        if (!is_valid_topic_filter(sub.filter)) throw Malformed{"invalid topic filter"};
        sub.qos = r.u8();
        if (sub.qos > 2) throw Malformed{"invalid requested qos"};
        s.subscriptions.push_back(std::move(sub));
    }
    if (s.subscriptions.empty()) throw Malformed{"subscribe without filters"};
    return s;
}

Packet decode_suback(Reader& r) {
    Suback s;
    s.packet_id = r.packet_id();
    while (!r.done()) {
        const auto g = r.u8();
        if (g > 2 && g != kSubackFailure) throw Malformed{"invalid suback code"};
        s.granted.push_back(g);
    }
    if (s.granted.empty()) throw Malformed{"suback without return codes"};
    return s;
}

Packet decode_unsubscribe(Reader& r) {
    Unsubscribe u;
    u.packet_id = r.packet_id();
    while (!r.done()) {
        auto f = r.string();
        if (!is_valid_topic_filter(f)) throw Malformed{"invalid topic filter"};
        u.filters.push_back(std::move(f));
    }
    if (u.filters.empty()) throw Malformed{"unsubscribe without filters"};
    return u;
}

Packet decode_body(PacketType type, std::uint8_t flags, Reader& r) {
    switch (type) {
        case PacketType::Connect:
            expect_flags(flags, 0);
            return decode_connect(r);
        case PacketType::Connack: {
            expect_flags(flags, 0);
            const auto ack = r.u8();
            if (ack & 0xFE) throw Malformed{"reserved connack flags set"};
            const auto rc = r.u8();
            if (rc > 5) throw Malformed{"unknown connack return code"};
            expect_done(r);
            return Connack{static_cast<bool>(ack & 1), static_cast<ConnectReturnCode>(rc)};
        }
        case PacketType::Publish: return decode_publish(flags, r);
        case PacketType::Puback: {
            expect_flags(flags, 0);
            Puback p{r.packet_id()};
            expect_done(r);
            return p;
        }
        case PacketType::Subscribe:
            expect_flags(flags, 0x2);
            return decode_subscribe(r);
        case PacketType::Suback:
            expect_flags(flags, 0);
            return decode_suback(r);
        case PacketType::Unsubscribe:
            expect_flags(flags, 0x2);
            return decode_unsubscribe(r);
        case PacketType::Unsuback: {
            expect_flags(flags, 0);
            Unsuback u{r.packet_id()};
            expect_done(r);
            return u;
        }
        case PacketType::Pingreq:
            expect_flags(flags, 0);
            expect_done(r);
            return Pingreq{};
        case PacketType::Pingresp:
            expect_flags(flags, 0);
            expect_done(r);
            return Pingresp{};
        case PacketType::Disconnect:
            expect_flags(flags, 0);
            expect_done(r);
            return Disconnect{};
        case PacketType::Pubrec:
        case PacketType::Pubrel:
        case PacketType::Pubcomp: throw Malformed{"qos 2 flow is not supported"};
    }
    throw Malformed{"reserved packet type"};
}

}  // namespace

PacketType packet_type(const Packet& p) noexcept {
    struct Visitor {
        PacketType operator()(const Connect&) const { return PacketType::Connect; }
        PacketType operator()(const Connack&) const { return PacketType::Connack; }
        PacketType operator()(const Publish&) const { return PacketType::Publish; }
        PacketType operator()(const Puback&) const { return PacketType::Puback; }
        PacketType operator()(const Subscribe&) const { return PacketType::Subscribe; }
        PacketType operator()(const Suback&) const { return PacketType::Suback; }
        PacketType operator()(const Unsubscribe&) const { return PacketType::Unsubscribe; }
        PacketType operator()(const Unsuback&) const { return PacketType::Unsuback; }
        PacketType operator()(const Pingreq&) const { return PacketType::Pingreq; }
        PacketType operator()(const Pingresp&) const { return PacketType::Pingresp; }
        PacketType operator()(const Disconnect&) const { return PacketType::Disconnect; }
    };
    return std::visit(Visitor{}, p);
}

bool is_valid_mqtt_string(std::string_view s) noexcept {
    if (s.size() > 0xFFFF) return false;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c == 0x00) return false;
        if (c < 0x80) {
            ++i;
            continue;
        }
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                              (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

Bytes encode_remaining_length(std::uint32_t n) {
    if (n > kMaxRemainingLength) throw ValidationError("mqtt: remaining length out of range");
    Bytes out;
    do {
        auto digit = static_cast<std::uint8_t>(n % 128);
        n /= 128;
        if (n > 0) digit |= 0x80;
        out.push_back(digit);
    } while (n > 0);
    return out;
}

LengthResult decode_remaining_length(std::span<const std::uint8_t> bytes) {
    std::uint32_t value = 0;
    std::uint32_t multiplier = 1;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size()) return {DecodeStatus::NeedMoreBytes, 0, 0};
        const std::uint8_t b = bytes[i];
        value += (b & 0x7F) * multiplier;
        if ((b & 0x80) == 0) {
            // A zero final digit after a continuation byte is a non-minimal encoding.
            if (i > 0 && b == 0) return {DecodeStatus::Malformed, 0, 0};
            return {DecodeStatus::Ok, value, i + 1};
        }
        multiplier *= 128;
    }
    return {DecodeStatus::Malformed, 0, 0};
}

Bytes encode_packet(const Packet& packet) {
    return std::visit([](const auto& p) { return encode(p); }, packet);
}

DecodeResult decode_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return {DecodeStatus::NeedMoreBytes, std::nullopt, 0, {}};
    const std::uint8_t first = bytes[0];
    const auto type_nibble = static_cast<std::uint8_t>(first >> 4);
    if (type_nibble == 0 || type_nibble == 15)
        return {DecodeStatus::Malformed, std::nullopt, 0, "reserved packet type"};

    const auto len = decode_remaining_length(bytes.subspan(1));
    if (len.status == DecodeStatus::NeedMoreBytes)
        return {DecodeStatus::NeedMoreBytes, std::nullopt, 0, {}};
    if (len.status == DecodeStatus::Malformed)
        return {DecodeStatus::Malformed, std::nullopt, 0, "bad remaining length"};

    const std::size_t header = 1 + len.consumed;
    const std::size_t total = header + len.value;
    if (bytes.size() < total) return {DecodeStatus::NeedMoreBytes, std::nullopt, 0, {}};

    Reader reader(bytes.subspan(header, len.value));
    try {
        Packet p = decode_body(static_cast<PacketType>(type_nibble),
                               static_cast<std::uint8_t>(first & 0x0F), reader);
        return {DecodeStatus::Ok, std::move(p), total, {}};
    } catch (const Malformed& m) {
        return {DecodeStatus::Malformed, std::nullopt, 0, m.why};
    }
}

}  // namespace storetwin::mqtt
