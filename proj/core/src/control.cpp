#include "storetwin/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "storetwin/error.hpp"

namespace storetwin::control {

namespace {

constexpr double kDutyWindowS = 86400.0;

using sensing::SensorReading;

double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

void apply_timers(ActuatorLatch& latch, bool desired, double min_on_s, double min_off_s,
                  double t_s) {
    if (desired == latch.on) return;
    const double need = latch.on ? min_on_s : min_off_s;
    if (latch.last_transition_s && t_s - *latch.last_transition_s < need) return;
    latch.on = desired;
    latch.last_transition_s = t_s;
}

void update_band(bool& demand, double value, double on_threshold, double band) {
    if (value >= on_threshold) {
        demand = true;
    } else if (value <= on_threshold - band) {
        demand = false;
    }
}

void account_uvc(ControllerState& s, double t_s) {
    const bool was_on = s.latch(Actuator::Uvc).on;
    if (s.last_tick_s && was_on && t_s > *s.last_tick_s) {
        auto& iv = s.uvc_usage.intervals;
        if (!iv.empty() && iv.back().second == *s.last_tick_s) {
            iv.back().second = t_s;
        } else {
            iv.emplace_back(*s.last_tick_s, t_s);
        }
    }
    auto& iv = s.uvc_usage.intervals;
    while (!iv.empty() && iv.front().second <= t_s - kDutyWindowS) iv.pop_front();
    s.last_tick_s = t_s;
}

}  // namespace

std::string_view to_string(Actuator a) noexcept {
    switch (a) {
        case Actuator::Fan: return "fan";
        case Actuator::Dehumidifier: return "dehumidifier";
        case Actuator::Cooler: return "cooler";
        case Actuator::Uvc: return "uvc";
    }
    return "unknown";
}

std::string_view to_string(AlarmKind k) noexcept {
    switch (k) {
        case AlarmKind::OverTemp: return "over_temp";
        case AlarmKind::OverHumidity: return "over_humidity";
        case AlarmKind::GasSpike: return "gas_spike";
        case AlarmKind::SensorFault: return "sensor_fault";
    }
    return "unknown";
}

void validate(const ControllerConfig& c) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(c.temp_high_on_c) || !finite(c.rh_high_on_pct))
        throw ValidationError("controller thresholds must be finite");
    if (!(c.temp_hyst_c > 0.0) || !(c.rh_hyst_pct > 0.0))
        throw ValidationError("hysteresis bands must be positive");
    if (!(c.gas_spike_factor > 0.0) || !(c.gas_abs_floor_ppm >= 0.0))
        throw ValidationError("gas spike factor must be positive and floor >= 0");
    if (!(c.gas_baseline_window_s > 0.0))
        throw ValidationError("gas_baseline_window_s must be positive");
    if (!(c.uvc_max_duty > 0.0 && c.uvc_max_duty <= 1.0))
        throw ValidationError("uvc_max_duty must lie in (0, 1]");
    if (!(c.uvc_min_on_s >= 0.0) || !(c.uvc_min_off_s >= 0.0) || !(c.actuator_min_on_s >= 0.0) ||
        !(c.actuator_min_off_s >= 0.0))
        throw ValidationError("minimum on/off times must be >= 0");
    if (c.uvc_min_on_s > c.uvc_max_duty * kDutyWindowS)
        throw ValidationError("uvc_min_on_s cannot exceed the daily duty budget");
}

unsigned ControllerState::alarm_flags() const noexcept {
    unsigned flags = 0;
    for (std::size_t i = 0; i < kAlarmKindCount; ++i)
        if (active_alarms[i]) flags |= 1u << i;
    return flags;
}

RelayBank RelayBank::from_state(const ControllerState& s) {
    return {s.latch(Actuator::Fan).on, s.latch(Actuator::Dehumidifier).on,
            s.latch(Actuator::Cooler).on, s.latch(Actuator::Uvc).on};
}

bool RelayBank::channel(Actuator a) const noexcept {
    switch (a) {
        case Actuator::Fan: return fan;
        case Actuator::Dehumidifier: return dehumidifier;
        case Actuator::Cooler: return cooler;
        case Actuator::Uvc: return uvc;
    }
    return false;
}

std::pair<GasBaseline, bool> detect_gas_spike(const GasBaseline& baseline, double reading_ppm,
                                              const ControllerConfig& config, double t_s) {
    GasBaseline next = baseline;
    if (!next.initialized) {
        next.initialized = true;
        next.baseline_ppm = reading_ppm;
        next.last_t_s = t_s;
    }
    if (t_s < next.last_t_s) throw ValidationError("gas detector: time went backwards");

    const bool spike = reading_ppm >= config.gas_spike_factor * next.baseline_ppm &&
                       reading_ppm >= config.gas_abs_floor_ppm;
    if (!spike) {
        const double alpha = 1.0 - std::exp(-(t_s - next.last_t_s) / config.gas_baseline_window_s);
        next.baseline_ppm += alpha * (reading_ppm - next.baseline_ppm);
    }
    next.last_t_s = t_s;
    next.spiking = spike;
    return {next, spike};
}

double uvc_on_time_in_window(const ControllerState& state, double t_s) {
    const double start = t_s - kDutyWindowS;
    double used = 0.0;
    for (const auto& [a, b] : state.uvc_usage.intervals) used += overlap(a, b, start, t_s);
    if (state.latch(Actuator::Uvc).on && state.last_tick_s)
        used += overlap(*state.last_tick_s, t_s, start, t_s);
    return used;
}

bool uvc_duty_guard(const ControllerState& state, bool request_on, const ControllerConfig& config,
                    double t_s) {
    const auto& latch = state.latch(Actuator::Uvc);
    const double budget = config.uvc_max_duty * kDutyWindowS;
    const double used = uvc_on_time_in_window(state, t_s);
    const double since = latch.last_transition_s ? t_s - *latch.last_transition_s
                                                 : std::numeric_limits<double>::infinity();
    if (latch.on) {
        if (used >= budget) return false;
        if (!request_on) return since < config.uvc_min_on_s;
        return true;
    }
    if (!request_on || since < config.uvc_min_off_s) return false;
    return used + config.uvc_min_on_s <= budget;
}

TickResult tick(const ControllerState& state, const SensorReading& temp, const SensorReading& rh,
                const SensorReading& gas_ppm, const ControllerConfig& config, double t_s) {
    validate(config);
    if (!std::isfinite(t_s)) throw ValidationError("controller: t_s must be finite");
    if (state.last_tick_s && t_s < *state.last_tick_s)
        throw ValidationError("controller: time went backwards");
    if (temp.t_s > t_s || rh.t_s > t_s || gas_ppm.t_s > t_s)
        throw ValidationError("controller: reading stamped after tick time");

    ControllerState next = state;
    account_uvc(next, t_s);

    if (temp.ok) update_band(next.temp_demand, temp.value, config.temp_high_on_c, config.temp_hyst_c);
    if (rh.ok) update_band(next.rh_demand, rh.value, config.rh_high_on_pct, config.rh_hyst_pct);

    bool spike = state.gas.spiking;
    if (gas_ppm.ok) {
        auto [baseline, s] = detect_gas_spike(state.gas, gas_ppm.value, config, t_s);
        next.gas = baseline;
        spike = s;
    }

    // Invalid readings hold whatever their rule last produced.
    const bool temp_term_fan = temp.ok ? next.temp_demand : state.latch(Actuator::Fan).on;
    const bool temp_term_cooler = temp.ok ? next.temp_demand : state.latch(Actuator::Cooler).on;
    const bool rh_term_dehum = rh.ok ? next.rh_demand : state.latch(Actuator::Dehumidifier).on;
    const bool rh_term_uvc = rh.ok ? next.rh_demand : state.latch(Actuator::Uvc).on;

    apply_timers(next.latch(Actuator::Fan), temp_term_fan || spike, config.actuator_min_on_s,
                 config.actuator_min_off_s, t_s);
    apply_timers(next.latch(Actuator::Cooler), temp_term_cooler, config.actuator_min_on_s,
                 config.actuator_min_off_s, t_s);
    apply_timers(next.latch(Actuator::Dehumidifier), rh_term_dehum, config.actuator_min_on_s,
                 config.actuator_min_off_s, t_s);

    const bool uvc_allowed = uvc_duty_guard(next, rh_term_uvc || spike, config, t_s);
    auto& uvc = next.latch(Actuator::Uvc);
    if (uvc_allowed != uvc.on) {
        uvc.on = uvc_allowed;
        uvc.last_transition_s = t_s;
    }

    const bool fault = !temp.ok || !rh.ok || !gas_ppm.ok;
    const std::array<bool, kAlarmKindCount> wanted = {
        next.temp_demand, next.rh_demand, spike, config.alarm_on_sensor_fault && fault};

    std::vector<Alarm> events;
    for (std::size_t i = 0; i < kAlarmKindCount; ++i) {
        auto& active = next.active_alarms[i];
        const auto kind = static_cast<AlarmKind>(i);
        if (wanted[i] && !active) {
            active = t_s;
            events.push_back({kind, t_s, std::nullopt});
        } else if (!wanted[i] && active && t_s > *active) {
            events.push_back({kind, *active, t_s});
            active.reset();
        }
    }

    RelayBank relays = RelayBank::from_state(next);
    return {std::move(next), relays, std::move(events)};
}

}  // namespace storetwin::control
