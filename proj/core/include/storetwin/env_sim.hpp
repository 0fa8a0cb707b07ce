#pragma once

/**
 * @file env_sim.hpp
 * @brief Discrete-time environment of the storage chamber.
 *
 * Temperature and humidity relax exponentially toward a target set by the
 * ambient air and the running actuators. Spoilage gas accumulates from the
 * crop source term and is vented while the fans run.
 */

namespace storetwin::env {

struct ChamberState {
    double temp_c = 25.0;
    double rh_pct = 60.0;
    double gas_ppm = 0.0;
    double onion_mass_kg = 0.0;
    double t_s = 0.0;

    bool operator==(const ChamberState&) const = default;
};

struct AmbientSample {
    double temp_c = 25.0;
    double rh_pct = 60.0;

    bool operator==(const AmbientSample&) const = default;
};

struct ChamberParams {
    double tau_thermal_s = 6.0 * 3600.0;
    double tau_moisture_s = 4.0 * 3600.0;
    double fan_exchange_multiplier = 1.5;
    double cooler_effectiveness = 0.6;
    double cooler_rh_bias_pct = 5.0;  // pads humidify the supply air
    double dehumidifier_rh_per_hour = 10.0;
    double gas_vent_fraction_per_step = 0.05;
    double gas_vent_reference_step_s = 60.0;
    double volume_m3 = 100.0;
};

/// Throws ValidationError if any parameter is outside its documented range.
void validate(const ChamberParams& params);

struct ActuatorInputs {
    bool fan_on = false;
    bool dehumidifier_on = false;
    bool cooler_on = false;
    bool uvc_on = false;

    bool operator==(const ActuatorInputs&) const = default;
};

enum class StabilityGuard { Enforce, Relaxed };

/// Stull (2011) empirical wet-bulb temperature. Valid for rh in (0, 100]
/// and temp in [-20, 50] C; the result never exceeds the dry-bulb input.
double wet_bulb(double temp_c, double rh_pct);

/// Supply-air temperature of an evaporative pad with the given effectiveness.
double evaporative_cooling_target(double ambient_temp_c, double ambient_rh_pct,
                                  double effectiveness);

/// Advances the chamber by dt_s. The step must satisfy
/// dt_s <= min(tau_thermal_s, tau_moisture_s) / 10 unless the guard is relaxed.
ChamberState step_chamber(const ChamberState& state, AmbientSample ambient,
                          ActuatorInputs act, const ChamberParams& params,
                          double gas_source_ppm_per_s, double dt_s,
                          StabilityGuard guard = StabilityGuard::Enforce);

}  // namespace storetwin::env
