#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "storetwin/control.hpp"
#include "storetwin/error.hpp"

using namespace storetwin;
using namespace storetwin::control;
using sensing::SensorReading;

namespace {

struct Loop {
    ControllerConfig cfg{};
    ControllerState state{};
    std::vector<Alarm> last_alarms;

    RelayBank step(double t, double temp, double rh, double gas = 1.0, bool ok = true) {
        auto r = tick(state, {temp, t, ok}, {rh, t, ok}, {gas, t, true}, cfg, t);
        state = r.state;
        last_alarms = r.alarms;
        return r.relays;
    }
};

bool has_alarm(const std::vector<Alarm>& v, AlarmKind k, bool raised) {
    for (const auto& a : v)
        if (a.kind == k && a.cleared_at_s.has_value() != raised) return true;
    return false;
}

}  // namespace

TEST(Tick, HotReadingTurnsFanOn) {
    Loop l;
    const auto r = l.step(0.0, 31.0, 50.0);
    EXPECT_TRUE(r.fan);
    EXPECT_TRUE(r.cooler);
    EXPECT_FALSE(r.uvc);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::OverTemp, true));
}

TEST(Tick, HumidReadingTurnsUvcAndDehumidifierOn) {
    Loop l;
    const auto r = l.step(0.0, 25.0, 80.0);
    EXPECT_TRUE(r.uvc);
    EXPECT_TRUE(r.dehumidifier);
    EXPECT_FALSE(r.fan);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::OverHumidity, true));
}

TEST(Tick, TemperatureHysteresis) {
    Loop l;
    l.cfg.actuator_min_on_s = 0.0;
    EXPECT_TRUE(l.step(0.0, 31.0, 50.0).fan);
    EXPECT_TRUE(l.step(60.0, 29.5, 50.0).fan);
    EXPECT_TRUE(l.step(120.0, 28.5, 50.0).fan);
    EXPECT_FALSE(l.step(180.0, 27.9, 50.0).fan);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::OverTemp, false));
}

TEST(Tick, MinOnTimeDelaysRelease) {
    Loop l;
    EXPECT_TRUE(l.step(0.0, 31.0, 50.0).fan);
    EXPECT_TRUE(l.step(60.0, 20.0, 50.0).fan);
    EXPECT_TRUE(l.step(240.0, 20.0, 50.0).fan);
    EXPECT_FALSE(l.step(300.0, 20.0, 50.0).fan);
    // And min off before the next on.
    EXPECT_FALSE(l.step(360.0, 35.0, 50.0).fan);
    EXPECT_TRUE(l.step(600.0, 35.0, 50.0).fan);
}

TEST(Tick, FaultyReadingHoldsLatchesAndAlarms) {
    Loop l;
    EXPECT_TRUE(l.step(0.0, 31.0, 80.0).fan);
    const auto r = l.step(600.0, 10.0, 10.0, 1.0, false);
    EXPECT_TRUE(r.fan);
    EXPECT_TRUE(r.dehumidifier);
    EXPECT_TRUE(r.uvc);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::SensorFault, true));
    const auto r2 = l.step(1200.0, 10.0, 10.0);
    EXPECT_FALSE(r2.fan);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::SensorFault, false));
}

TEST(Tick, SensorFaultAlarmConfigurable) {
    Loop l;
    l.cfg.alarm_on_sensor_fault = false;
    l.step(0.0, 25.0, 50.0, 1.0, false);
    EXPECT_EQ(l.state.alarm_flags(), 0u);
}

TEST(Tick, RejectsTimeTravel) {
    Loop l;
    l.step(100.0, 25.0, 50.0);
    EXPECT_THROW(l.step(50.0, 25.0, 50.0), ValidationError);
    EXPECT_THROW(tick(l.state, {25.0, 300.0, true}, {50.0, 100.0, true}, {1.0, 100.0, true}, l.cfg,
                      200.0),
                 ValidationError);
}

TEST(Tick, GasSpikeRequestsUvcAndFan) {
    Loop l;
    for (double t = 0.0; t <= 3600.0; t += 60.0) {
        const auto r = l.step(t, 25.0, 50.0, 10.0);
        ASSERT_FALSE(r.uvc);
    }
    const auto r = l.step(3660.0, 25.0, 50.0, 35.0);
    EXPECT_TRUE(r.uvc);
    EXPECT_TRUE(r.fan);
    EXPECT_FALSE(r.cooler);
    EXPECT_TRUE(has_alarm(l.last_alarms, AlarmKind::GasSpike, true));
}

TEST(Tick, PureTransition) {
    Loop l;
    l.step(0.0, 31.0, 80.0);
    const auto a = tick(l.state, {29.0, 60.0, true}, {74.0, 60.0, true}, {3.0, 60.0, true}, l.cfg, 60.0);
    const auto b = tick(l.state, {29.0, 60.0, true}, {74.0, 60.0, true}, {3.0, 60.0, true}, l.cfg, 60.0);
    EXPECT_EQ(a.state, b.state);
    EXPECT_EQ(a.relays, b.relays);
    EXPECT_EQ(a.alarms, b.alarms);
}

TEST(Tick, RelayBankMirrorsLatches) {
    Loop l;
    const auto r = l.step(0.0, 31.0, 80.0);
    EXPECT_EQ(r, RelayBank::from_state(l.state));
    for (auto a : {Actuator::Fan, Actuator::Dehumidifier, Actuator::Cooler, Actuator::Uvc})
        EXPECT_EQ(r.channel(a), l.state.latch(a).on);
}

TEST(GasSpike, ConstantNeverSpikes) {
    ControllerConfig cfg;
    GasBaseline b;
    for (double t = 0.0; t < 7 * 86400.0; t += 60.0) {
        auto [nb, spike] = detect_gas_spike(b, 10.0, cfg, t);
        ASSERT_FALSE(spike);
        b = nb;
    }
    EXPECT_DOUBLE_EQ(b.baseline_ppm, 10.0);
}

TEST(GasSpike, StepFlagsFirstSample) {
    ControllerConfig cfg;
    GasBaseline b;
    for (double t = 0.0; t <= 3600.0; t += 60.0) b = detect_gas_spike(b, 10.0, cfg, t).first;
    auto [nb, spike] = detect_gas_spike(b, 35.0, cfg, 3660.0);
    EXPECT_TRUE(spike);
    EXPECT_DOUBLE_EQ(nb.baseline_ppm, 10.0);  // frozen during the spike
    EXPECT_TRUE(nb.spiking);
}

TEST(GasSpike, FloorGuard) {
    ControllerConfig cfg;
    GasBaseline b;
    for (double t = 0.0; t <= 3600.0; t += 60.0) b = detect_gas_spike(b, 1.0, cfg, t).first;
    EXPECT_FALSE(detect_gas_spike(b, 4.0, cfg, 3660.0).second);
}

TEST(GasSpike, EwmaAlphaFromElapsedTime) {
    ControllerConfig cfg;
    GasBaseline b;
    b = detect_gas_spike(b, 10.0, cfg, 0.0).first;
    b = detect_gas_spike(b, 20.0, cfg, 3600.0).first;
    EXPECT_NEAR(b.baseline_ppm, 10.0 + 10.0 * (1.0 - std::exp(-1.0)), 1e-12);
}

TEST(UvcGuard, FreshStateAllowed) {
    EXPECT_TRUE(uvc_duty_guard(ControllerState{}, true, ControllerConfig{}, 0.0));
    EXPECT_FALSE(uvc_duty_guard(ControllerState{}, false, ControllerConfig{}, 0.0));
}

TEST(UvcGuard, SixHoursExhaustsBudgetThenWindowRolls) {
    Loop l;
    l.cfg.rh_hyst_pct = 50.0;
    double t = 0.0;
    double first_off = -1.0;
    for (; t <= 86400.0; t += 60.0) {
        const auto r = l.step(t, 25.0, 90.0);
        if (!r.uvc && first_off < 0.0) first_off = t;
    }
    EXPECT_DOUBLE_EQ(first_off, 6.0 * 3600.0);
    EXPECT_FALSE(uvc_duty_guard(l.state, true, l.cfg, first_off + 60.0));
    // After the earlier usage leaves the trailing day the lamp is allowed again.
    bool relit = false;
    for (; t <= 2 * 86400.0; t += 60.0) relit |= l.step(t, 25.0, 90.0).uvc;
    EXPECT_TRUE(relit);
}

TEST(Config, Validation) {
    ControllerConfig c;
    EXPECT_NO_THROW(validate(c));
    c.temp_hyst_c = 0.0;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.uvc_max_duty = 1.5;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.uvc_max_duty = 0.001;
    EXPECT_THROW(validate(c), ValidationError);
    c = {};
    c.gas_baseline_window_s = 0.0;
    EXPECT_THROW(validate(c), ValidationError);
}

TEST(Properties, MinOnOffNeverViolated) {
    Gen g(2024);
    for (int trial = 0; trial < 40; ++trial) {
        Loop l;
        l.cfg.actuator_min_on_s = g.uniform(0.0, 900.0);
        l.cfg.actuator_min_off_s = g.uniform(0.0, 900.0);
        std::array<std::optional<double>, kActuatorCount> last{};
        std::array<bool, kActuatorCount> prev{};
        double t = 0.0;
        for (int i = 0; i < 3000; ++i) {
            t += g.uniform(1.0, 120.0);
            const auto r = l.step(t, g.uniform(20.0, 40.0), g.uniform(50.0, 100.0),
                                  g.uniform(0.0, 60.0), g.coin(0.95));
            for (std::size_t a = 0; a < kActuatorCount; ++a) {
                const bool on = r.channel(static_cast<Actuator>(a));
                if (on == prev[a]) continue;
                if (last[a]) {
                    const bool is_uvc = a == static_cast<std::size_t>(Actuator::Uvc);
                    const double need = on ? (is_uvc ? l.cfg.uvc_min_off_s : l.cfg.actuator_min_off_s)
                                           : (is_uvc ? l.cfg.uvc_min_on_s : l.cfg.actuator_min_on_s);
                    ASSERT_GE(t - *last[a], need) << "actuator " << a;
                }
                last[a] = t;
                prev[a] = on;
            }
        }
    }
}

TEST(Properties, UvcDutyWithinCapPlusOneTick) {
    Gen g(77);
    Loop l;
    const double dt = 60.0;
    std::vector<bool> on;
    for (int i = 0; i < 5 * 1440; ++i) {
        const double t = i * dt;
        on.push_back(l.step(t, 25.0, g.coin(0.7) ? 90.0 : 60.0, g.uniform(1, 50)).uvc);
    }
    const std::size_t win = 1440;
    std::size_t count = 0;
    for (std::size_t i = 0; i < on.size(); ++i) {
        count += on[i];
        if (i >= win) count -= on[i - win];
        ASSERT_LE(count * dt, l.cfg.uvc_max_duty * 86400.0 + dt);
    }
}

TEST(Properties, SingleUpwardCrossingGivesOneFanTransition) {
    Gen g(9);
    for (int trial = 0; trial < 100; ++trial) {
        Loop l;
        double temp = g.uniform(15.0, 29.0);
        const double peak = g.uniform(30.0, 40.0);
        int transitions = 0;
        bool prev = false;
        for (int i = 0; i < 2000; ++i) {
            temp = std::min(peak, temp + g.uniform(0.0, 0.05));
            const bool on = l.step(i * 60.0, temp, 50.0).fan;
            transitions += on != prev;
            prev = on;
        }
        EXPECT_EQ(transitions, 1);
    }
}

TEST(Properties, SmallSinusoidNeverChatters) {
    Gen g(10);
    for (int trial = 0; trial < 50; ++trial) {
        Loop l;
        const double centre = g.uniform(20.0, 40.0);
        const double amp = g.uniform(0.0, 0.99);  // peak-to-peak < 2 C band
        const double period = g.uniform(600.0, 86400.0);
        int transitions = 0;
        bool prev = false;
        for (double t = 0.0; t <= 86400.0; t += 60.0) {
            const double v = centre + amp * std::sin(2.0 * std::numbers::pi * t / period);
            const bool on = l.step(t, v, 50.0).fan;
            if (t > 0.0) transitions += on != prev;
            prev = on;
        }
        EXPECT_LE(transitions, 1);
    }
}
