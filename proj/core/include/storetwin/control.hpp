#pragma once

/**
 * @file control.hpp
 * @brief Threshold controller for the storage chamber.
 *
 * Temperature drives the fans and evaporative cooler. Humidity drives the
 * dehumidifier and the UV-C lamp. A gas spike over the rolling baseline
 * additionally requests UV-C and fan venting. Every request passes through
 * hysteresis, minimum on/off timers and, for the lamp, a rolling 24 h duty
 * cap before it reaches the relay bank.
 *
 * `tick` is a pure transition: the same state and inputs always yield the
 * same successor state, relay bank and alarm events.
 */

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "storetwin/sensing.hpp"

namespace storetwin::control {

struct ControllerConfig {
    double temp_high_on_c = 30.0;
    double temp_hyst_c = 2.0;
    double rh_high_on_pct = 75.0;
    double rh_hyst_pct = 5.0;
    double gas_spike_factor = 3.0;
    double gas_baseline_window_s = 3600.0;
    double gas_abs_floor_ppm = 5.0;
    double uvc_max_duty = 0.25;  // of every trailing 24 h
    double uvc_min_on_s = 600.0;
    double uvc_min_off_s = 600.0;
    double actuator_min_on_s = 300.0;
    double actuator_min_off_s = 300.0;
    bool alarm_on_sensor_fault = true;
};

void validate(const ControllerConfig& config);

enum class Actuator : std::uint8_t { Fan = 0, Dehumidifier = 1, Cooler = 2, Uvc = 3 };
inline constexpr std::size_t kActuatorCount = 4;
std::string_view to_string(Actuator a) noexcept;

enum class AlarmKind : std::uint8_t { OverTemp = 0, OverHumidity = 1, GasSpike = 2, SensorFault = 3 };
inline constexpr std::size_t kAlarmKindCount = 4;
std::string_view to_string(AlarmKind k) noexcept;

/// An alarm event. Raise events carry no clear time; clear events carry both.
struct Alarm {
    AlarmKind kind = AlarmKind::OverTemp;
    double raised_at_s = 0.0;
    std::optional<double> cleared_at_s;

    bool operator==(const Alarm&) const = default;
};

struct GasBaseline {
    bool initialized = false;
    double baseline_ppm = 0.0;
    double last_t_s = 0.0;
    bool spiking = false;

    bool operator==(const GasBaseline&) const = default;
};

struct ActuatorLatch {
    bool on = false;
    std::optional<double> last_transition_s;

    bool operator==(const ActuatorLatch&) const = default;
};

/// Closed UV-C on-intervals inside the trailing 24 h window.
struct UvcUsage {
    std::deque<std::pair<double, double>> intervals;

    bool operator==(const UvcUsage&) const = default;
};

struct ControllerState {
    std::array<ActuatorLatch, kActuatorCount> latches{};
    bool temp_demand = false;
    bool rh_demand = false;
    GasBaseline gas{};
    UvcUsage uvc_usage{};
    std::optional<double> last_tick_s;
    std::array<std::optional<double>, kAlarmKindCount> active_alarms{};  // raise time per kind

    [[nodiscard]] const ActuatorLatch& latch(Actuator a) const {
        return latches[static_cast<std::size_t>(a)];
    }
    [[nodiscard]] ActuatorLatch& latch(Actuator a) { return latches[static_cast<std::size_t>(a)]; }

    /// Bit i set when AlarmKind i is active.
    [[nodiscard]] unsigned alarm_flags() const noexcept;

    bool operator==(const ControllerState&) const = default;
};

struct RelayBank {
    bool fan = false;
    bool dehumidifier = false;
    bool cooler = false;
    bool uvc = false;

    static RelayBank from_state(const ControllerState& state);
    [[nodiscard]] bool channel(Actuator a) const noexcept;

    bool operator==(const RelayBank&) const = default;
};

struct TickResult {
    ControllerState state;
    RelayBank relays;
    std::vector<Alarm> alarms;  // raised or cleared during this tick
};

/// Exponentially weighted baseline over gas_baseline_window_s. A sample
/// spikes when it is at least gas_spike_factor times the baseline and above
/// the absolute floor; spiking samples do not update the baseline.
std::pair<GasBaseline, bool> detect_gas_spike(const GasBaseline& baseline, double reading_ppm,
                                              const ControllerConfig& config, double t_s);

/// UV-C on-time inside (t_s - 24 h, t_s], including the open interval since
/// the last tick when the lamp is latched on.
double uvc_on_time_in_window(const ControllerState& state, double t_s);

/// Whether the lamp may be on after this tick given the request, the
/// minimum on/off times and the rolling duty cap. A lamp is only switched on
/// when the remaining budget covers a full minimum on-time.
bool uvc_duty_guard(const ControllerState& state, bool request_on, const ControllerConfig& config,
                    double t_s);

/// One control step. Throws ValidationError when time runs backwards or a
/// reading is stamped after t_s.
TickResult tick(const ControllerState& state, const sensing::SensorReading& temp,
                const sensing::SensorReading& rh, const sensing::SensorReading& gas_ppm,
                const ControllerConfig& config, double t_s);

}  // namespace storetwin::control
