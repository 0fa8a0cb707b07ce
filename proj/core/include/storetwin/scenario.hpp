#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "storetwin/ambient.hpp"
#include "storetwin/control.hpp"
#include "storetwin/env_sim.hpp"
#include "storetwin/sensing.hpp"
#include "storetwin/spoilage.hpp"

namespace storetwin::harness {

/// Capital and running-cost assumptions. Only the capex anchors are sourced;
/// the rated powers and prices are placeholders to be replaced per site.
struct CostModel {
    double system_capex_inr = 65'000.0;
    double cold_storage_capex_inr = 650'000.0;
    double traditional_capex_inr = 0.0;
    double fan_w = 200.0;
    double dehumidifier_w = 300.0;
    double cooler_w = 150.0;
    double uvc_w = 40.0;
    double energy_price_inr_per_kwh = 8.0;
    double onion_price_inr_per_kg = 20.0;

    [[nodiscard]] double rated_power_w(control::Actuator a) const noexcept;
};

void validate(const CostModel& costs);

struct TelemetryConfig {
    bool enabled = false;
    std::string host = "127.0.0.1";
    std::uint16_t port = 1883;
    std::string store_id = "store1";
    double publish_interval_s = 600.0;
    std::size_t queue_capacity = 4096;
};

struct Scenario {
    std::string id = "scenario";
    double duration_s = 90.0 * 86400.0;
    double dt_s = 60.0;
    std::uint64_t seed = 1;

    env::AmbientProfile ambient = env::AmbientProfile::monsoon();
    std::string ambient_label = "monsoon";

    env::ChamberState initial{34.0, 85.0, 5.0, 10'000.0, 0.0};
    env::ChamberParams chamber{};

    spoilage::SpoilageRates rates{};
    double d90_dose_j_m2 = 40.0;
    double uvc_intensity_w_m2 = 0.02;
    double gas_emission_coeff = spoilage::kDefaultEmissionCoeff;

    sensing::Dht22Model dht22{};
    sensing::Mq135Model mq135{};

    control::ControllerConfig controller{};
    bool controller_enabled = true;

    sensing::FaultPlan faults{};
    TelemetryConfig telemetry{};
    CostModel costs{};
};

/// Throws ValidationError naming the first offending field.
void validate(const Scenario& s);

/// Built-in presets. `monsoon`: 34 C / 85 %RH for 90 days. `diurnal`: hot
/// dry afternoons, humid nights. `constant`: mild 25 C / 65 %RH.
Scenario preset(std::string_view name);

/// Parses the JSON scenario schema (see README). Unknown keys are rejected.
/// Relative ambient CSV paths resolve against `base_dir`.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Loads a scenario file, optionally applying an overlay file (JSON merge
/// patch, e.g. a calibration sidecar) before parsing.
Scenario load_scenario(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& overlay = std::nullopt);

}  // namespace storetwin::harness
