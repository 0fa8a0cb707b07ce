#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "storetwin/runner.hpp"

namespace storetwin::harness {

namespace {

constexpr std::array<control::Actuator, control::kActuatorCount> kActuators = {
    control::Actuator::Fan, control::Actuator::Dehumidifier, control::Actuator::Cooler,
    control::Actuator::Uvc};

constexpr std::array<control::AlarmKind, control::kAlarmKindCount> kAlarms = {
    control::AlarmKind::OverTemp, control::AlarmKind::OverHumidity, control::AlarmKind::GasSpike,
    control::AlarmKind::SensorFault};

constexpr std::array<spoilage::Regime, 4> kRegimes = {
    spoilage::Regime::Safe, spoilage::Regime::WeightLoss, spoilage::Regime::Sprouting,
    spoilage::Regime::Rotting};

}  // namespace

void write_csv(const std::vector<LogRow>& log, std::ostream& out) {
    out << kCsvHeader << '\n';
    fmt::memory_buffer buf;
    for (const auto& r : log) {
        buf.clear();
        fmt::format_to(std::back_inserter(buf),
                       "{:.1f},{:.6f},{:.6f},{:.6f},{},{:.9f},{:.9f},{:.9f},{:.9f},{:d},{:d},{:d},{:d},{}\n",
                       r.t_s, r.temp_c, r.rh_pct, r.gas_ppm, spoilage::to_string(r.regime),
                       r.ledger.weight_loss_pct, r.ledger.rot_pct, r.ledger.sprout_pct,
                       r.ledger.mold_index, int{r.applied.fan_on}, int{r.applied.dehumidifier_on},
                       int{r.applied.cooler_on}, int{r.applied.uvc_on}, r.alarm_flags);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

std::string report_to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["controller_enabled"] = r.controller_enabled;
    j["duration_s"] = r.duration_s;
    j["dt_s"] = r.dt_s;
    j["ticks"] = r.ticks;
    j["spoilage"] = {
        {"weight_loss_pct", r.final_ledger.weight_loss_pct},
        {"rot_pct", r.final_ledger.rot_pct},
        {"sprout_pct", r.final_ledger.sprout_pct},
        {"mold_index", r.final_ledger.mold_index},
        {"pathogen_rot_pct", r.pathogen_rot_pct},
        {"total_spoilage_pct", r.total_spoilage_pct},
        {"market_value_loss_pct", r.market_value_loss_pct},
    };
    nlohmann::ordered_json act;
    for (std::size_t i = 0; i < kActuators.size(); ++i) {
        act[std::string(control::to_string(kActuators[i]))] = {
            {"on_time_s", r.on_time_s[i]},
            {"duty_cycle", r.duty_cycle[i]},
            {"transitions", r.transitions[i]},
        };
    }
    j["actuators"] = act;
    j["energy_kwh"] = r.energy_kwh;
    nlohmann::ordered_json alarms;
    for (std::size_t i = 0; i < kAlarms.size(); ++i)
        alarms[std::string(control::to_string(kAlarms[i]))] = r.alarm_counts[i];
    j["alarm_counts"] = alarms;
    nlohmann::ordered_json regimes;
    for (std::size_t i = 0; i < kRegimes.size(); ++i)
        regimes[std::string(spoilage::to_string(kRegimes[i]))] = r.regime_time_s[i];
    j["regime_time_s"] = regimes;
    j["peaks"] = {{"temp_c", r.peak_temp_c}, {"rh_pct", r.peak_rh_pct}, {"gas_ppm", r.peak_gas_ppm}};
    j["mass_kg"] = {{"initial", r.initial_mass_kg}, {"final", r.final_mass_kg}};
    j["telemetry"] = {{"sent", r.telemetry_sent}, {"dropped", r.telemetry_dropped}};
    return j.dump(2);
}

std::string report_to_text(const RunReport& r) {
    std::string s;
    auto out = std::back_inserter(s);
    fmt::format_to(out, "scenario      {}  (controller {})\n", r.scenario_id,
                   r.controller_enabled ? "on" : "off");
    fmt::format_to(out, "duration      {:.2f} d, dt {} s, {} ticks\n", r.duration_s / 86400.0,
                   r.dt_s, r.ticks);
    fmt::format_to(out, "spoilage      {:.2f} %  (weight {:.2f}, rot {:.2f}, sprout {:.2f})\n",
                   r.total_spoilage_pct, r.final_ledger.weight_loss_pct, r.final_ledger.rot_pct,
                   r.final_ledger.sprout_pct);
    fmt::format_to(out, "pathogen rot  {:.2f} %\n", r.pathogen_rot_pct);
    fmt::format_to(out, "mold index    {:.4f}\n", r.final_ledger.mold_index);
    fmt::format_to(out, "value loss    {:.2f} %\n", r.market_value_loss_pct);
    fmt::format_to(out, "mass          {:.1f} -> {:.1f} kg\n", r.initial_mass_kg, r.final_mass_kg);
    fmt::format_to(out, "energy        {:.2f} kWh\n", r.energy_kwh);
    for (std::size_t i = 0; i < kActuators.size(); ++i) {
        fmt::format_to(out, "  {:<13} duty {:6.2f} %  transitions {}\n",
                       control::to_string(kActuators[i]), 100.0 * r.duty_cycle[i],
                       r.transitions[i]);
    }
    for (std::size_t i = 0; i < kAlarms.size(); ++i) {
        fmt::format_to(out, "  alarm {:<12} raised {}\n", control::to_string(kAlarms[i]),
                       r.alarm_counts[i]);
    }
    fmt::format_to(out, "peaks         {:.2f} C, {:.2f} %RH, {:.2f} ppm\n", r.peak_temp_c,
                   r.peak_rh_pct, r.peak_gas_ppm);
    if (r.telemetry_sent || r.telemetry_dropped)
        fmt::format_to(out, "telemetry     sent {} dropped {}\n", r.telemetry_sent,
                       r.telemetry_dropped);
    return s;
}

}  // namespace storetwin::harness
