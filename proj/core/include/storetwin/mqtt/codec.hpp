#pragma once

/**
 * @file codec.hpp
 * @brief MQTT 3.1.1 control packets and their wire encoding.
 *
 * Supported: QoS 0 and 1. QoS 2 publishes and the PUBREC/PUBREL/PUBCOMP
 * flow are rejected as malformed.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace storetwin::mqtt {

using Bytes = std::vector<std::uint8_t>;

enum class PacketType : std::uint8_t {
    Connect = 1,
    Connack = 2,
    Publish = 3,
    Puback = 4,
    Pubrec = 5,
    Pubrel = 6,
    Pubcomp = 7,
    Subscribe = 8,
    Suback = 9,
    Unsubscribe = 10,
    Unsuback = 11,
    Pingreq = 12,
    Pingresp = 13,
    Disconnect = 14,
};

struct Will {
    std::string topic;
    Bytes message;
    std::uint8_t qos = 0;
    bool retain = false;

    bool operator==(const Will&) const = default;
};

struct Connect {
    std::string client_id;
    std::uint16_t keep_alive_s = 60;
    bool clean_session = true;
    std::optional<Will> will;
    std::optional<std::string> username;
    std::optional<Bytes> password;  // only valid together with a username

    bool operator==(const Connect&) const = default;
};

enum class ConnectReturnCode : std::uint8_t {
    Accepted = 0,
    UnacceptableProtocolVersion = 1,
    IdentifierRejected = 2,
    ServerUnavailable = 3,
    BadUsernameOrPassword = 4,
    NotAuthorized = 5,
};

struct Connack {
    bool session_present = false;
    ConnectReturnCode return_code = ConnectReturnCode::Accepted;

    bool operator==(const Connack&) const = default;
};

struct Publish {
    std::string topic;
    Bytes payload;
    std::uint8_t qos = 0;  // 0 or 1
    bool retain = false;
    bool dup = false;  // only meaningful for qos 1
    std::optional<std::uint16_t> packet_id;  // present iff qos == 1

    bool operator==(const Publish&) const = default;
};

struct Puback {
    std::uint16_t packet_id = 0;
    bool operator==(const Puback&) const = default;
};

struct Subscription {
    std::string filter;
    std::uint8_t qos = 0;
    bool operator==(const Subscription&) const = default;
};

struct Subscribe {
    std::uint16_t packet_id = 0;
    std::vector<Subscription> subscriptions;
    bool operator==(const Subscribe&) const = default;
};

inline constexpr std::uint8_t kSubackFailure = 0x80;

struct Suback {
    std::uint16_t packet_id = 0;
    std::vector<std::uint8_t> granted;  // 0, 1, 2 or 0x80
    bool operator==(const Suback&) const = default;
};

struct Unsubscribe {
    std::uint16_t packet_id = 0;
    std::vector<std::string> filters;
    bool operator==(const Unsubscribe&) const = default;
};

struct Unsuback {
    std::uint16_t packet_id = 0;
    bool operator==(const Unsuback&) const = default;
};

struct Pingreq {
    bool operator==(const Pingreq&) const = default;
};
struct Pingresp {
    bool operator==(const Pingresp&) const = default;
};
struct Disconnect {
    bool operator==(const Disconnect&) const = default;
};

using Packet = std::variant<Connect, Connack, Publish, Puback, Subscribe, Suback, Unsubscribe,
                            Unsuback, Pingreq, Pingresp, Disconnect>;

PacketType packet_type(const Packet& p) noexcept;

inline constexpr std::uint32_t kMaxRemainingLength = 268'435'455;

/// Minimal base-128 encoding, 1 to 4 bytes. Throws ValidationError above the maximum.
Bytes encode_remaining_length(std::uint32_t n);

enum class DecodeStatus { Ok, NeedMoreBytes, Malformed };

struct LengthResult {
    DecodeStatus status = DecodeStatus::Ok;
    std::uint32_t value = 0;
    std::size_t consumed = 0;
};

/// Rejects non-minimal encodings and a fifth length byte.
LengthResult decode_remaining_length(std::span<const std::uint8_t> bytes);

/// Throws ValidationError when the packet violates a protocol invariant
/// (empty or wildcard publish topic, missing packet id on qos 1, ...).
Bytes encode_packet(const Packet& packet);

struct DecodeResult {
    DecodeStatus status = DecodeStatus::Malformed;
    std::optional<Packet> packet;
    std::size_t consumed = 0;
    std::string error;  // set when Malformed
};

/// Decodes one packet from the front of `bytes`. Never reads beyond the
/// declared remaining length.
DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

/// MQTT UTF-8 string rule: well-formed UTF-8, no U+0000, at most 65535 bytes.
bool is_valid_mqtt_string(std::string_view s) noexcept;

}  // namespace storetwin::mqtt
