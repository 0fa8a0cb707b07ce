#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gen.hpp"
#include "storetwin/error.hpp"
#include "storetwin/sensing.hpp"

using namespace storetwin;
using namespace storetwin::sensing;

namespace {

Dht22Model noiseless() {
    Dht22Model m;
    m.temp_noise_sd = 0.0;
    m.rh_noise_sd = 0.0;
    return m;
}

}  // namespace

TEST(Dht22, ClampsToDatasheetRange) {
    RngStream rng(1, 1);
    auto [t, rh] = sample_dht22(100.0, 120.0, noiseless(), rng);
    EXPECT_DOUBLE_EQ(t.value, 80.0);
    EXPECT_DOUBLE_EQ(rh.value, 100.0);
    auto [t2, rh2] = sample_dht22(-60.0, -5.0, noiseless(), rng);
    EXPECT_DOUBLE_EQ(t2.value, -40.0);
    EXPECT_DOUBLE_EQ(rh2.value, 0.0);
}

TEST(Dht22, NoiselessRoundsToResolution) {
    RngStream rng(1, 1);
    auto [t, rh] = sample_dht22(23.456, 61.04, noiseless(), rng, 12.0);
    EXPECT_NEAR(t.value, 23.5, 1e-12);
    EXPECT_NEAR(rh.value, 61.0, 1e-12);
    EXPECT_DOUBLE_EQ(t.t_s, 12.0);
    EXPECT_TRUE(t.ok);
}

TEST(Dht22, NoiseStatistics) {
    RngStream rng(42, 1);
    Dht22Model m;
    m.temp_resolution = 1e-6;
    double sum = 0.0, sq = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double v = sample_dht22(25.0, 50.0, m, rng).first.value;
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_GE(sd, 0.4);
    EXPECT_LE(sd, 0.6);
    EXPECT_NEAR(mean, 25.0, 0.05);
}

TEST(Dht22, OutputsAlwaysInRange) {
    Gen g(8);
    RngStream rng(7, 1);
    Dht22Model m;
    m.temp_noise_sd = 20.0;
    m.rh_noise_sd = 50.0;
    for (int i = 0; i < 20000; ++i) {
        auto [t, rh] = sample_dht22(g.uniform(-200, 200), g.uniform(-200, 300), m, rng);
        ASSERT_GE(t.value, -40.0);
        ASSERT_LE(t.value, 80.0);
        ASSERT_GE(rh.value, 0.0);
        ASSERT_LE(rh.value, 100.0);
    }
}

TEST(Dht22, ChannelHonoursMinInterval) {
    Dht22Model m;
    Dht22Channel ch(m, RngStream(3, 1));
    const auto a = ch.read(25.0, 50.0, 0.0);
    const auto b = ch.read(40.0, 90.0, 1.5);
    EXPECT_EQ(a, b);
    const auto c = ch.read(40.0, 90.0, 2.0);
    EXPECT_NE(a.first.value, c.first.value);
}

TEST(Rng, SameSeedSameSequence) {
    RngStream a(99, 2), b(99, 2), c(99, 3);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.gaussian(1.0);
        ASSERT_EQ(x, b.gaussian(1.0));
        differs |= x != c.gaussian(1.0);
    }
    EXPECT_TRUE(differs);
}

TEST(Mq135, CalibrationPointReadsDividerVoltage) {
    Mq135Model m;
    const double ppm = std::pow(1.0 / m.curve_a, 1.0 / m.curve_b);
    EXPECT_NEAR(ppm, 29.10408495219345, 1e-9);
    const double volts = m.adc_vref * m.load_resistor_ohm / (m.load_resistor_ohm + m.r0_ohm);
    const auto expected = static_cast<std::uint32_t>(std::lround(volts / m.adc_vref * m.adc_max()));
    EXPECT_EQ(mq135_counts(ppm, m), expected);
    EXPECT_EQ(expected, 614u);
}

TEST(Mq135, ForwardVectors) {
    Mq135Model m;
    EXPECT_EQ(mq135_counts(0.0, m), 0u);
    EXPECT_EQ(mq135_counts(1.0, m), 301u);
    EXPECT_EQ(mq135_counts(10.0, m), 512u);
    EXPECT_EQ(mq135_counts(100.0, m), 722u);
    EXPECT_EQ(mq135_counts(1000.0, m), 872u);
    EXPECT_THROW(mq135_counts(-1.0, m), ValidationError);
}

TEST(Mq135, MonotoneInPpm) {
    Mq135Model m;
    std::uint32_t prev = 0;
    for (double ppm = 0.0; ppm <= 5000.0; ppm += 0.5) {
        const auto c = mq135_counts(ppm, m);
        ASSERT_GE(c, prev);
        ASSERT_LE(c, m.adc_max());
        prev = c;
    }
}

TEST(Mq135, RoundTripWithinOneStep) {
    Mq135Model m;
    const auto est = adc_to_ppm(mq135_counts(100.0, m), m);
    EXPECT_TRUE(est.ok);
    EXPECT_NEAR(est.ppm, 100.0, 10.0);
    for (double ppm = 1.0; ppm <= 1000.0; ppm *= 1.05) {
        const auto c = mq135_counts(ppm, m);
        const double lo = adc_to_ppm(c - 1, m).ppm;
        const double hi = adc_to_ppm(c + 1, m).ppm;
        ASSERT_LE(lo, ppm);
        ASSERT_GE(hi, ppm);
    }
}

TEST(Mq135, RailsAreFlagged) {
    Mq135Model m;
    const auto top = adc_to_ppm(m.adc_max(), m);
    EXPECT_FALSE(top.ok);
    EXPECT_DOUBLE_EQ(top.ppm, m.detect_max_ppm);
    const auto bottom = adc_to_ppm(0, m);
    EXPECT_FALSE(bottom.ok);
    EXPECT_DOUBLE_EQ(bottom.ppm, m.detect_min_ppm);
    EXPECT_THROW(adc_to_ppm(m.adc_max() + 1, m), ValidationError);
}

TEST(Mq135, NoiseIsDeterministicPerSeed) {
    Mq135Model m;
    RngStream a(5, 2), b(5, 2);
    for (int i = 0; i < 500; ++i) ASSERT_EQ(sample_mq135(50.0, m, a), sample_mq135(50.0, m, b));
    m.rs_noise_sd = 0.0;
    RngStream c(5, 2);
    EXPECT_EQ(sample_mq135(50.0, m, c), mq135_counts(50.0, m));
}

TEST(Faults, Windows) {
    FaultPlan plan;
    plan.windows.push_back({Channel::Temp, 100.0, 200.0, FaultMode::Dropout});
    plan.windows.push_back({Channel::Rh, 100.0, 200.0, FaultMode::Stuck});
    const SensorReading prev{20.0, 40.0, true};

    const SensorReading before{25.0, 99.0, true};
    EXPECT_EQ(apply_faults(before, plan, Channel::Temp, prev), before);

    const auto drop = apply_faults({25.0, 100.0, true}, plan, Channel::Temp, prev);
    EXPECT_FALSE(drop.ok);
    EXPECT_DOUBLE_EQ(drop.value, 20.0);

    SensorReading held = prev;
    for (double t = 100.0; t < 200.0; t += 10.0) {
        held = apply_faults({50.0 + t, t, true}, plan, Channel::Rh, held);
        EXPECT_TRUE(held.ok);
        EXPECT_DOUBLE_EQ(held.value, 20.0);
    }
    EXPECT_EQ(apply_faults({25.0, 200.0, true}, plan, Channel::Temp, prev).value, 25.0);
    EXPECT_EQ(apply_faults({25.0, 150.0, true}, plan, Channel::Gas, prev).value, 25.0);

    FaultPlan bad;
    bad.windows.push_back({Channel::Gas, 5.0, 5.0, FaultMode::Stuck});
    EXPECT_THROW(validate(bad), ValidationError);
}
