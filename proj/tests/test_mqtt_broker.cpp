#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "storetwin/mqtt/broker.hpp"
#include "storetwin/mqtt/client.hpp"

using namespace storetwin::mqtt;
using namespace std::chrono_literals;

namespace {

struct BrokerFixture : ::testing::Test {
    Broker broker{BrokerOptions{"127.0.0.1", 0}};

    void SetUp() override { broker.start(); }
    void TearDown() override { broker.stop(); }

    MqttClient client(const std::string& id, std::uint16_t keep_alive = 30) {
        Connect c;
        c.client_id = id;
        c.keep_alive_s = keep_alive;
        return MqttClient::connect("127.0.0.1", broker.port(), c);
    }
};

Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::vector<Publish> drain(MqttClient& c, std::chrono::milliseconds wait) {
    std::vector<Publish> out;
    while (auto p = c.receive(wait)) {
        if (auto* pub = std::get_if<Publish>(&*p)) out.push_back(*pub);
    }
    return out;
}

}  // namespace

TEST_F(BrokerFixture, RoutesExactlyOneCopy) {
    auto a = client("a");
    auto b = client("b");
    const auto ack = a.subscribe({{"s/#", 0}, {"s/t", 0}, {"s/+", 1}});
    EXPECT_EQ(ack.granted, (std::vector<std::uint8_t>{0, 0, 1}));
    b.publish("s/t", text("hello"));
    const auto got = drain(a, 300ms);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].topic, "s/t");
    EXPECT_EQ(got[0].payload, text("hello"));
    EXPECT_EQ(got[0].qos, 0);  // never above the publish qos
    EXPECT_TRUE(drain(b, 100ms).empty());

    b.publish_qos1("s/t", text("again"));
    const auto upgraded = drain(a, 300ms);
    ASSERT_EQ(upgraded.size(), 1u);
    EXPECT_EQ(upgraded[0].qos, 1);  // highest matching grant
    ASSERT_TRUE(upgraded[0].packet_id.has_value());
}

TEST_F(BrokerFixture, NonMatchingSessionsGetNothing) {
    auto a = client("a");
    auto c = client("c");
    auto b = client("b");
    a.subscribe({{"x/+", 0}});
    c.subscribe({{"y/#", 0}});
    b.publish("x/1", text("1"));
    EXPECT_EQ(drain(a, 300ms).size(), 1u);
    EXPECT_TRUE(drain(c, 100ms).empty());
}

TEST_F(BrokerFixture, Qos1GetsMatchingPuback) {
    auto a = client("a");
    a.send_packet(Publish{"q/1", text("x"), 1, false, false, 4242});
    auto p = a.receive(2000ms);
    ASSERT_TRUE(p);
    ASSERT_TRUE(std::holds_alternative<Puback>(*p));
    EXPECT_EQ(std::get<Puback>(*p).packet_id, 4242);
    EXPECT_NO_THROW(a.publish_qos1("q/1", text("y")));
}

TEST_F(BrokerFixture, GrantsAtMostQos1) {
    auto a = client("a");
    const auto ack = a.subscribe({{"z", 1}, {"w", 0}});
    EXPECT_EQ(ack.granted, (std::vector<std::uint8_t>{1, 0}));
}

TEST_F(BrokerFixture, PingAndUnsubscribe) {
    auto a = client("a");
    auto b = client("b");
    EXPECT_TRUE(a.ping());
    a.subscribe({{"u/#", 0}});
    a.send_packet(Unsubscribe{7, {"u/#"}});
    auto p = a.receive(2000ms);
    ASSERT_TRUE(p);
    ASSERT_TRUE(std::holds_alternative<Unsuback>(*p));
    EXPECT_EQ(std::get<Unsuback>(*p).packet_id, 7);
    b.publish("u/1", text("x"));
    EXPECT_TRUE(drain(a, 200ms).empty());
}

TEST_F(BrokerFixture, RetainedDeliveredOnSubscribe) {
    auto b = client("b");
    b.publish("r/1", text("kept"), true);
    b.ping();
    auto a = client("a");
    a.subscribe({{"r/#", 0}});
    const auto got = drain(a, 300ms);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_TRUE(got[0].retain);
    EXPECT_EQ(got[0].payload, text("kept"));
}

TEST_F(BrokerFixture, KeepAliveExpiryAtOneAndAHalfIntervals) {
    auto silent = client("silent", 2);
    const auto t0 = std::chrono::steady_clock::now();
    while (silent.connected() && std::chrono::steady_clock::now() - t0 < 6s) silent.receive(50ms);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_FALSE(silent.connected());
    EXPECT_NEAR(elapsed, 3.0, 0.5);
    EXPECT_EQ(broker.stats().keepalive_expiries, 1u);
}

TEST_F(BrokerFixture, PingsKeepSessionAlive) {
    auto c = client("pinger", 1);
    for (int i = 0; i < 6; ++i) {
        std::this_thread::sleep_for(400ms);
        ASSERT_TRUE(c.ping());
    }
    EXPECT_TRUE(c.connected());
}

TEST_F(BrokerFixture, DuplicateClientIdClosesOlderSession) {
    auto first = client("dup");
    auto second = client("dup");
    first.receive(500ms);
    EXPECT_FALSE(first.connected());
    EXPECT_TRUE(second.ping());
}

TEST_F(BrokerFixture, WillPublishedOnAbnormalClose) {
    auto watcher = client("watcher");
    watcher.subscribe({{"will/#", 0}});
    {
        Connect c;
        c.client_id = "dying";
        c.will = Will{"will/dying", text("gone"), 0, false};
        auto dying = MqttClient::connect("127.0.0.1", broker.port(), c);
        dying.send_bytes(Bytes{0xF0, 0x00});  // reserved type: broker must drop us
        dying.receive(500ms);
        EXPECT_FALSE(dying.connected());
    }
    const auto got = drain(watcher, 500ms);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].payload, text("gone"));
}

TEST_F(BrokerFixture, CleanDisconnectSuppressesWill) {
    auto watcher = client("watcher");
    watcher.subscribe({{"will/#", 0}});
    Connect c;
    c.client_id = "polite";
    c.will = Will{"will/polite", text("gone"), 0, false};
    auto polite = MqttClient::connect("127.0.0.1", broker.port(), c);
    polite.disconnect();
    EXPECT_TRUE(drain(watcher, 400ms).empty());
}

TEST_F(BrokerFixture, EmptyClientIdNeedsCleanSession) {
    Connect c;
    c.clean_session = false;
    EXPECT_THROW(MqttClient::connect("127.0.0.1", broker.port(), c), SessionClosedError);
    c.clean_session = true;
    auto ok = MqttClient::connect("127.0.0.1", broker.port(), c);
    EXPECT_TRUE(ok.ping());
}

TEST_F(BrokerFixture, ClosedSessionReportsError) {
    auto a = client("a");
    a.disconnect();
    EXPECT_FALSE(a.connected());
    EXPECT_THROW(a.publish("x", text("y")), SessionClosedError);
}

TEST(Broker, UnreachableBrokerThrows) {
    Broker b{BrokerOptions{"127.0.0.1", 0}};
    b.start();
    const auto port = b.port();
    b.stop();
    Connect c;
    c.client_id = "x";
    EXPECT_THROW(MqttClient::connect("127.0.0.1", port, c, std::chrono::milliseconds(500)),
                 SessionClosedError);
}
