#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "storetwin/control.hpp"
#include "storetwin/scenario.hpp"
#include "storetwin/spoilage.hpp"

namespace storetwin::harness {

/// One row of the time-series log. Relay columns hold the actuator inputs
/// that were applied during the step ending at t_s.
struct LogRow {
    double t_s = 0.0;
    double temp_c = 0.0;
    double rh_pct = 0.0;
    double gas_ppm = 0.0;
    spoilage::Regime regime = spoilage::Regime::Safe;
    spoilage::SpoilageLedger ledger{};
    env::ActuatorInputs applied{};
    unsigned alarm_flags = 0;
};

inline constexpr const char* kCsvHeader =
    "t_s,temp_c,rh_pct,gas_ppm,regime,weight_loss_pct,rot_pct,sprout_pct,mold_index,fan,dehum,"
    "cooler,uvc,alarm_flags";

struct RunReport {
    std::string scenario_id;
    bool controller_enabled = false;
    double duration_s = 0.0;
    double dt_s = 0.0;
    std::size_t ticks = 0;

    spoilage::SpoilageLedger final_ledger{};
    double total_spoilage_pct = 0.0;
    double market_value_loss_pct = 0.0;
    double pathogen_rot_pct = 0.0;  // part of rot_pct driven by mold

    std::array<double, control::kActuatorCount> on_time_s{};
    std::array<double, control::kActuatorCount> duty_cycle{};
    std::array<std::size_t, control::kActuatorCount> transitions{};
    double energy_kwh = 0.0;

    std::array<std::size_t, control::kAlarmKindCount> alarm_counts{};
    std::array<double, 4> regime_time_s{};  // indexed by Regime

    double peak_temp_c = 0.0;
    double peak_rh_pct = 0.0;
    double peak_gas_ppm = 0.0;
    double initial_mass_kg = 0.0;
    double final_mass_kg = 0.0;

    std::uint64_t telemetry_sent = 0;
    std::uint64_t telemetry_dropped = 0;
};

struct RunOptions {
    bool keep_log = true;
    /// Overrides the scenario's telemetry endpoint and enables publishing.
    std::optional<std::pair<std::string, std::uint16_t>> mqtt_endpoint;
};

struct RunResult {
    RunReport report;
    std::vector<LogRow> log;
};

/// Runs the closed loop for floor(duration_s / dt_s) ticks. Deterministic for
/// a fixed scenario; the controller output of one tick drives the next step.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

void write_csv(const std::vector<LogRow>& log, std::ostream& out);
std::string report_to_json(const RunReport& report);
std::string report_to_text(const RunReport& report);

}  // namespace storetwin::harness
