#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gen.hpp"
#include "storetwin/ambient.hpp"
#include "storetwin/env_sim.hpp"
#include "storetwin/error.hpp"

using namespace storetwin;
using namespace storetwin::env;

// Stull wet-bulb values evaluated independently in double precision.
TEST(WetBulb, MatchesIndependentEvaluation) {
    EXPECT_NEAR(wet_bulb(20.0, 50.0), 13.699341968988136, 1e-9);
    EXPECT_NEAR(wet_bulb(30.0, 50.0), 22.296833962680253, 1e-9);
    EXPECT_NEAR(wet_bulb(35.0, 40.0), 24.514154084763003, 1e-9);
    EXPECT_NEAR(wet_bulb(34.0, 85.0), 31.770670958811397, 1e-9);
}

TEST(WetBulb, SaturatedAirEqualsDryBulb) {
    EXPECT_NEAR(wet_bulb(20.0, 100.0), 20.0, 0.5);
    EXPECT_LE(wet_bulb(20.0, 100.0), 20.0);
}

TEST(WetBulb, MonotoneInHumidity) {
    EXPECT_LT(wet_bulb(20.0, 30.0), wet_bulb(20.0, 80.0));
    // The Stull fit is not monotone below freezing at low humidity.
    for (double t = 5.0; t <= 50.0; t += 5.0) {
        double prev = -1e9;
        for (double rh = 5.0; rh <= 100.0; rh += 5.0) {
            const double w = wet_bulb(t, rh);
            EXPECT_LE(w, t);
            EXPECT_GE(w, prev - 1e-9) << t << " " << rh;
            prev = w;
        }
    }
}

TEST(WetBulb, NeverAboveDryBulb) {
    for (double t = -20.0; t <= 50.0; t += 2.5)
        for (double rh = 1.0; rh <= 100.0; rh += 1.0) EXPECT_LE(wet_bulb(t, rh), t) << t << " " << rh;
}

TEST(WetBulb, RejectsOutOfRange) {
    EXPECT_THROW(wet_bulb(20.0, 0.0), ValidationError);
    EXPECT_THROW(wet_bulb(20.0, 100.5), ValidationError);
    EXPECT_THROW(wet_bulb(-21.0, 50.0), ValidationError);
    EXPECT_THROW(wet_bulb(51.0, 50.0), ValidationError);
    EXPECT_THROW(wet_bulb(NAN, 50.0), ValidationError);
}

TEST(CoolingTarget, Blends) {
    EXPECT_DOUBLE_EQ(evaporative_cooling_target(35.0, 40.0, 0.0), 35.0);
    EXPECT_DOUBLE_EQ(evaporative_cooling_target(35.0, 40.0, 1.0), wet_bulb(35.0, 40.0));
    EXPECT_NEAR(evaporative_cooling_target(35.0, 40.0, 0.5), 29.757077042381503, 1e-9);
    EXPECT_THROW(evaporative_cooling_target(35.0, 40.0, 1.1), ValidationError);
}

TEST(CoolingTarget, NonIncreasingInEffectiveness) {
    double prev = 1e9;
    for (double e = 0.0; e <= 1.0 + 1e-12; e += 0.05) {
        const double v = evaporative_cooling_target(38.0, 30.0, std::min(e, 1.0));
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(StepChamber, FixedPoint) {
    ChamberState s{25.0, 60.0, 0.0, 100.0, 0.0};
    const auto n = step_chamber(s, {25.0, 60.0}, {}, ChamberParams{}, 0.0, 60.0);
    EXPECT_DOUBLE_EQ(n.temp_c, 25.0);
    EXPECT_DOUBLE_EQ(n.rh_pct, 60.0);
    EXPECT_DOUBLE_EQ(n.gas_ppm, 0.0);
    EXPECT_DOUBLE_EQ(n.t_s, 60.0);
}

TEST(StepChamber, RelaxedGuardLargeStepStaysBetween) {
    ChamberParams p;
    p.tau_thermal_s = 3600.0;
    ChamberState s{20.0, 60.0, 0.0, 0.0, 0.0};
    const auto n = step_chamber(s, {30.0, 60.0}, {}, p, 0.0, 3600.0, StabilityGuard::Relaxed);
    EXPECT_GT(n.temp_c, 20.0);
    EXPECT_LT(n.temp_c, 30.0);
    EXPECT_NEAR(n.temp_c, 30.0 - 10.0 * std::exp(-1.0), 1e-12);
    EXPECT_THROW(step_chamber(s, {30.0, 60.0}, {}, p, 0.0, 3600.0), ValidationError);
}

TEST(StepChamber, CoolerTargetsWetBulbBlend) {
    ChamberParams p;
    ChamberState s{30.0, 50.0, 0.0, 0.0, 0.0};
    ActuatorInputs a;
    a.cooler_on = true;
    // Many steps converge to the pad supply temperature.
    for (int i = 0; i < 24 * 60 * 20; ++i) s = step_chamber(s, {30.0, 50.0}, a, p, 0.0, 60.0);
    EXPECT_NEAR(s.temp_c, 25.378100377608153, 1e-6);
    EXPECT_NEAR(s.rh_pct, 55.0, 1e-6);
}

TEST(StepChamber, FanSpeedsUpRelaxation) {
    ChamberParams p;
    ChamberState s{20.0, 60.0, 0.0, 0.0, 0.0};
    ActuatorInputs fan;
    fan.fan_on = true;
    const auto slow = step_chamber(s, {30.0, 60.0}, {}, p, 0.0, 60.0);
    const auto fast = step_chamber(s, {30.0, 60.0}, fan, p, 0.0, 60.0);
    EXPECT_GT(fast.temp_c, slow.temp_c);
    EXPECT_NEAR(fast.temp_c, 30.0 - 10.0 * std::exp(-1.5 * 60.0 / p.tau_thermal_s), 1e-12);
}

TEST(StepChamber, DehumidifierLinearSink) {
    ChamberParams p;
    ChamberState s{25.0, 60.0, 0.0, 0.0, 0.0};
    ActuatorInputs a;
    a.dehumidifier_on = true;
    const auto n = step_chamber(s, {25.0, 60.0}, a, p, 0.0, 360.0);
    EXPECT_NEAR(n.rh_pct, 59.0, 1e-12);
    ChamberState dry{25.0, 0.5, 0.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(step_chamber(dry, {25.0, 0.0}, a, p, 0.0, 360.0).rh_pct, 0.0);
}

TEST(StepChamber, GasSourceAndVent) {
    ChamberParams p;
    ChamberState s{25.0, 60.0, 10.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(step_chamber(s, {25.0, 60.0}, {}, p, 0.01, 60.0).gas_ppm, 10.6);
    ActuatorInputs fan;
    fan.fan_on = true;
    EXPECT_NEAR(step_chamber(s, {25.0, 60.0}, fan, p, 0.0, 60.0).gas_ppm, 9.5, 1e-12);
    EXPECT_NEAR(step_chamber(s, {25.0, 60.0}, fan, p, 0.0, 120.0).gas_ppm, 9.0, 1e-12);
    EXPECT_GE(step_chamber(s, {25.0, 60.0}, {}, p, -1.0, 60.0).gas_ppm, 0.0);
}

TEST(StepChamber, RejectsBadInput) {
    ChamberParams p;
    ChamberState s;
    EXPECT_THROW(step_chamber(s, {25.0, 60.0}, {}, p, 0.0, 0.0), ValidationError);
    EXPECT_THROW(step_chamber(s, {25.0, 60.0}, {}, p, 0.0, -1.0), ValidationError);
    EXPECT_THROW(step_chamber(s, {NAN, 60.0}, {}, p, 0.0, 60.0), ValidationError);
    EXPECT_THROW(step_chamber(s, {25.0, 60.0}, {}, p, INFINITY, 60.0), ValidationError);
    EXPECT_THROW(step_chamber(s, {25.0, 60.0}, {}, p, 0.0, 1441.0), ValidationError);
    EXPECT_NO_THROW(step_chamber(s, {25.0, 60.0}, {}, p, 0.0, 1440.0));
    p.fan_exchange_multiplier = 0.5;
    EXPECT_THROW(step_chamber(s, {25.0, 60.0}, {}, p, 0.0, 60.0), ValidationError);
}

TEST(StepChamber, GapNonIncreasingAndDeterministic) {
    Gen g(11);
    ChamberParams p;
    for (int trial = 0; trial < 50; ++trial) {
        ChamberState s{g.uniform(-10, 45), g.uniform(0, 100), 0.0, 0.0, 0.0};
        const AmbientSample amb{g.uniform(-10, 45), g.uniform(0, 100)};
        double gap = std::abs(s.temp_c - amb.temp_c);
        for (int i = 0; i < 200; ++i) {
            const auto a = step_chamber(s, amb, {}, p, 0.0, 60.0);
            const auto b = step_chamber(s, amb, {}, p, 0.0, 60.0);
            ASSERT_EQ(a, b);
            const double ng = std::abs(a.temp_c - amb.temp_c);
            ASSERT_LE(ng, gap);
            gap = ng;
            s = a;
        }
    }
}

TEST(Ambient, InterpolatesAndClamps) {
    AmbientProfile one({{0.0, 30.0, 70.0}});
    EXPECT_EQ(ambient_at(one, 999.0), (AmbientSample{30.0, 70.0}));
    AmbientProfile two({{0.0, 20.0, 50.0}, {100.0, 30.0, 70.0}});
    EXPECT_EQ(ambient_at(two, 50.0), (AmbientSample{25.0, 60.0}));
    EXPECT_EQ(ambient_at(two, -10.0), (AmbientSample{20.0, 50.0}));
    EXPECT_EQ(ambient_at(two, 1e9), (AmbientSample{30.0, 70.0}));
    EXPECT_THROW(ambient_at(AmbientProfile{}, 0.0), ValidationError);
}

TEST(Ambient, RejectsBadSamples) {
    EXPECT_THROW(AmbientProfile({{0.0, 20.0, 50.0}, {0.0, 21.0, 50.0}}), ValidationError);
    EXPECT_THROW(AmbientProfile({{0.0, 20.0, 101.0}}), ValidationError);
    EXPECT_THROW(AmbientProfile({{0.0, NAN, 50.0}}), ValidationError);
}

TEST(Ambient, CsvRoundTrip) {
    std::istringstream in("t_s,temp_c,rh_pct\r\n0,20,50\r\n\n100,30,70\n");
    const auto p = AmbientProfile::from_csv(in);
    ASSERT_EQ(p.samples().size(), 2u);
    EXPECT_EQ(ambient_at(p, 50.0), (AmbientSample{25.0, 60.0}));

    std::istringstream bad_header("time,temp,rh\n0,1,2\n");
    EXPECT_THROW(AmbientProfile::from_csv(bad_header), ValidationError);
    std::istringstream bad_row("t_s,temp_c,rh_pct\n0,abc,50\n");
    EXPECT_THROW(AmbientProfile::from_csv(bad_row), ValidationError);
    std::istringstream extra("t_s,temp_c,rh_pct\n0,1,2,3\n");
    EXPECT_THROW(AmbientProfile::from_csv(extra), ValidationError);
}

TEST(Ambient, DiurnalShape) {
    const auto p = AmbientProfile::diurnal(30.0, 6.0, 60.0, 15.0, 86400.0);
    const auto peak = ambient_at(p, 15.0 * 3600.0);
    const auto trough = ambient_at(p, 3.0 * 3600.0);
    EXPECT_NEAR(peak.temp_c, 36.0, 1e-9);
    EXPECT_NEAR(peak.rh_pct, 45.0, 1e-9);
    EXPECT_NEAR(trough.temp_c, 24.0, 1e-9);
    EXPECT_NEAR(trough.rh_pct, 75.0, 1e-9);
}
