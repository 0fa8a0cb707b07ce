#include "storetwin/env_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "storetwin/error.hpp"

namespace storetwin::env {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

double relax(double value, double target, double rate_per_s, double dt_s) {
    return target + (value - target) * std::exp(-rate_per_s * dt_s);
}

}  // namespace

void validate(const ChamberParams& p) {
    require_finite(p.tau_thermal_s, "tau_thermal_s");
    require_finite(p.tau_moisture_s, "tau_moisture_s");
    require_finite(p.fan_exchange_multiplier, "fan_exchange_multiplier");
    require_finite(p.cooler_effectiveness, "cooler_effectiveness");
    require_finite(p.cooler_rh_bias_pct, "cooler_rh_bias_pct");
    require_finite(p.dehumidifier_rh_per_hour, "dehumidifier_rh_per_hour");
    require_finite(p.gas_vent_fraction_per_step, "gas_vent_fraction_per_step");
    require_finite(p.gas_vent_reference_step_s, "gas_vent_reference_step_s");
    require_finite(p.volume_m3, "volume_m3");
    if (p.tau_thermal_s <= 0.0 || p.tau_moisture_s <= 0.0)
        throw ValidationError("time constants must be positive");
    if (p.fan_exchange_multiplier < 1.0)
        throw ValidationError("fan_exchange_multiplier must be >= 1");
    if (p.cooler_effectiveness < 0.0 || p.cooler_effectiveness > 1.0)
        throw ValidationError("cooler_effectiveness must lie in [0, 1]");
    if (p.gas_vent_fraction_per_step < 0.0 || p.gas_vent_fraction_per_step > 1.0)
        throw ValidationError("gas_vent_fraction_per_step must lie in [0, 1]");
    if (p.gas_vent_reference_step_s <= 0.0)
        throw ValidationError("gas_vent_reference_step_s must be positive");
    if (p.dehumidifier_rh_per_hour < 0.0)
        throw ValidationError("dehumidifier_rh_per_hour must be >= 0");
    if (p.volume_m3 <= 0.0) throw ValidationError("volume_m3 must be positive");
}

double wet_bulb(double temp_c, double rh_pct) {
    require_finite(temp_c, "temp_c");
    require_finite(rh_pct, "rh_pct");
    if (rh_pct <= 0.0 || rh_pct > 100.0)
        throw ValidationError("wet_bulb: rh_pct must lie in (0, 100]");
    if (temp_c < -20.0 || temp_c > 50.0)
        throw ValidationError("wet_bulb: temp_c must lie in [-20, 50]");

    const double t = temp_c;
    const double rh = rh_pct;
    const double tw = t * std::atan(0.151977 * std::sqrt(rh + 8.313659)) + std::atan(t + rh) -
                      std::atan(rh - 1.676331) +
                      0.00391838 * std::pow(rh, 1.5) * std::atan(0.023101 * rh) - 4.686035;
    // The fit overshoots the dry bulb by ~0.01 C near saturation.
    return std::min(tw, temp_c);
}

double evaporative_cooling_target(double ambient_temp_c, double ambient_rh_pct,
                                  double effectiveness) {
    require_finite(effectiveness, "effectiveness");
    if (effectiveness < 0.0 || effectiveness > 1.0)
        throw ValidationError("effectiveness must lie in [0, 1]");
    const double depression = ambient_temp_c - wet_bulb(ambient_temp_c, ambient_rh_pct);
    return ambient_temp_c - effectiveness * depression;
}

ChamberState step_chamber(const ChamberState& state, AmbientSample ambient, ActuatorInputs act,
                          const ChamberParams& params, double gas_source_ppm_per_s,
                          double dt_s, StabilityGuard guard) {
    require_finite(state.temp_c, "state.temp_c");
    require_finite(state.rh_pct, "state.rh_pct");
    require_finite(state.gas_ppm, "state.gas_ppm");
    require_finite(state.onion_mass_kg, "state.onion_mass_kg");
    require_finite(state.t_s, "state.t_s");
    require_finite(ambient.temp_c, "ambient.temp_c");
    require_finite(ambient.rh_pct, "ambient.rh_pct");
    require_finite(gas_source_ppm_per_s, "gas_source_ppm_per_s");
    require_finite(dt_s, "dt_s");
    validate(params);
    if (dt_s <= 0.0) throw ValidationError("dt_s must be positive");
    if (guard == StabilityGuard::Enforce &&
        dt_s > std::min(params.tau_thermal_s, params.tau_moisture_s) / 10.0)
        throw ValidationError("dt_s exceeds the stability guard min(tau)/10");

    const double exchange = act.fan_on ? params.fan_exchange_multiplier : 1.0;

    ChamberState next = state;

    double temp_target = ambient.temp_c;
    double rh_target = ambient.rh_pct;
    if (act.cooler_on) {
        temp_target = evaporative_cooling_target(ambient.temp_c, ambient.rh_pct,
                                                 params.cooler_effectiveness);
        rh_target = std::min(100.0, rh_target + params.cooler_rh_bias_pct);
    }

    next.temp_c = relax(state.temp_c, temp_target, exchange / params.tau_thermal_s, dt_s);

    double rh = relax(state.rh_pct, rh_target, exchange / params.tau_moisture_s, dt_s);
    if (act.dehumidifier_on) rh -= params.dehumidifier_rh_per_hour * dt_s / 3600.0;
    next.rh_pct = std::clamp(rh, 0.0, 100.0);

    double gas = state.gas_ppm + gas_source_ppm_per_s * dt_s;
    if (act.fan_on)
        gas *= 1.0 - params.gas_vent_fraction_per_step * dt_s / params.gas_vent_reference_step_s;
    next.gas_ppm = std::max(0.0, gas);

    next.t_s = state.t_s + dt_s;
    return next;
}

}  // namespace storetwin::env
