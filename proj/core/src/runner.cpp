#include "storetwin/runner.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <tuple>

#include "storetwin/ambient.hpp"
#include "storetwin/sensing.hpp"
#include "storetwin/telemetry.hpp"

namespace storetwin::harness {

namespace {

constexpr double kSecondsPerDay = 86400.0;

constexpr std::array<control::Actuator, control::kActuatorCount> kActuators = {
    control::Actuator::Fan, control::Actuator::Dehumidifier, control::Actuator::Cooler,
    control::Actuator::Uvc};

bool actuator_on(const env::ActuatorInputs& a, control::Actuator which) {
    switch (which) {
        case control::Actuator::Fan: return a.fan_on;
        case control::Actuator::Dehumidifier: return a.dehumidifier_on;
        case control::Actuator::Cooler: return a.cooler_on;
        case control::Actuator::Uvc: return a.uvc_on;
    }
    return false;
}

env::ActuatorInputs to_inputs(const control::RelayBank& r) {
    return {r.fan, r.dehumidifier, r.cooler, r.uvc};
}

// Stream ids for the per-channel random streams.
constexpr std::uint64_t kDhtStream = 1;
constexpr std::uint64_t kGasStream = 2;

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    validate(scenario);
    const Scenario& s = scenario;

    RunResult result;
    RunReport& rep = result.report;
    rep.scenario_id = s.id;
    rep.controller_enabled = s.controller_enabled;
    rep.duration_s = s.duration_s;
    rep.dt_s = s.dt_s;
    rep.initial_mass_kg = s.initial.onion_mass_kg;
    rep.final_mass_kg = s.initial.onion_mass_kg;
    rep.peak_temp_c = s.initial.temp_c;
    rep.peak_rh_pct = s.initial.rh_pct;
    rep.peak_gas_ppm = s.initial.gas_ppm;

    const auto ticks = static_cast<std::size_t>(std::floor(s.duration_s / s.dt_s + 1e-9));
    rep.ticks = ticks;
    if (options.keep_log) result.log.reserve(ticks);

    std::unique_ptr<telemetry::TelemetryPublisher> publisher;
    if (options.mqtt_endpoint || s.telemetry.enabled) {
        auto host = s.telemetry.host;
        auto port = s.telemetry.port;
        if (options.mqtt_endpoint) std::tie(host, port) = *options.mqtt_endpoint;
        publisher = std::make_unique<telemetry::TelemetryPublisher>(
            host, port, "storetwin-" + s.telemetry.store_id, s.telemetry.queue_capacity);
    }
    const auto publish_every = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(s.telemetry.publish_interval_s / s.dt_s)));

    env::ChamberState state = s.initial;
    spoilage::SpoilageLedger ledger{};
    control::ControllerState ctl{};
    env::ActuatorInputs applied{};
    double gas_source = 0.0;

    sensing::Dht22Channel dht(s.dht22, sensing::RngStream(s.seed, kDhtStream));
    sensing::RngStream gas_rng(s.seed, kGasStream);
    sensing::SensorReading prev_temp{state.temp_c, state.t_s, true};
    sensing::SensorReading prev_rh{state.rh_pct, state.t_s, true};
    sensing::SensorReading prev_gas{state.gas_ppm, state.t_s, true};

    for (std::size_t k = 0; k < ticks; ++k) {
        // Environment and crop advance under the inputs latched last tick.
        const auto ambient = env::ambient_at(s.ambient, state.t_s);
        env::ChamberState next =
            env::step_chamber(state, ambient, applied, s.chamber, gas_source, s.dt_s);

        const double survival =
            applied.uvc_on ? spoilage::uvc_survival(s.uvc_intensity_w_m2, s.dt_s, s.d90_dose_j_m2)
                           : 1.0;
        const double mold = spoilage::step_mold(ledger, next.rh_pct, survival, s.rates, s.dt_s);
        spoilage::SpoilageLedger accrued =
            spoilage::step_spoilage(ledger, next.temp_c, next.rh_pct, s.rates, s.dt_s);
        rep.pathogen_rot_pct +=
            s.rates.rot_pathogen_coupling * ledger.mold_index * s.dt_s / kSecondsPerDay;
        accrued.mold_index = mold;

        const double delta_rot = accrued.rot_pct - ledger.rot_pct;
        gas_source = spoilage::gas_emission_rate(delta_rot, s.dt_s, next.onion_mass_kg,
                                                 s.gas_emission_coeff);
        next.onion_mass_kg = s.initial.onion_mass_kg * (1.0 - accrued.weight_loss_pct / 100.0);

        state = next;
        ledger = accrued;

        const auto regime = spoilage::classify_regime(state.temp_c, state.rh_pct);
        rep.regime_time_s[static_cast<std::size_t>(regime)] += s.dt_s;

        // Sensors.
        auto [temp_raw, rh_raw] = dht.read(state.temp_c, state.rh_pct, state.t_s);
        const auto counts = sensing::sample_mq135(state.gas_ppm, s.mq135, gas_rng);
        const auto est = sensing::adc_to_ppm(counts, s.mq135);
        const sensing::SensorReading gas_raw{est.ppm, state.t_s, est.ok};

        const auto temp = sensing::apply_faults(temp_raw, s.faults, sensing::Channel::Temp, prev_temp);
        const auto rh = sensing::apply_faults(rh_raw, s.faults, sensing::Channel::Rh, prev_rh);
        const auto gas = sensing::apply_faults(gas_raw, s.faults, sensing::Channel::Gas, prev_gas);
        prev_temp = temp;
        prev_rh = rh;
        prev_gas = gas;

        // Controller.
        env::ActuatorInputs next_inputs{};
        if (s.controller_enabled) {
            auto out = control::tick(ctl, temp, rh, gas, s.controller, state.t_s);
            ctl = std::move(out.state);
            next_inputs = to_inputs(out.relays);
            for (const auto& alarm : out.alarms)
                if (!alarm.cleared_at_s) ++rep.alarm_counts[static_cast<std::size_t>(alarm.kind)];
        }

        for (std::size_t i = 0; i < kActuators.size(); ++i) {
            const bool now_on = actuator_on(applied, kActuators[i]);
            if (now_on) rep.on_time_s[i] += s.dt_s;
            if (now_on != actuator_on(next_inputs, kActuators[i])) ++rep.transitions[i];
        }

        rep.peak_temp_c = std::max(rep.peak_temp_c, state.temp_c);
        rep.peak_rh_pct = std::max(rep.peak_rh_pct, state.rh_pct);
        rep.peak_gas_ppm = std::max(rep.peak_gas_ppm, state.gas_ppm);

        if (options.keep_log) {
            result.log.push_back({state.t_s, state.temp_c, state.rh_pct, state.gas_ppm, regime, ledger,
                                  applied, ctl.alarm_flags()});
        }

        if (publisher && k % publish_every == 0) {
            const auto& id = s.telemetry.store_id;
            const double t = state.t_s;
            publisher->enqueue(telemetry::sensor_topic(id, sensing::Channel::Temp),
                               {t, "temp", temp.value, temp.ok});
            publisher->enqueue(telemetry::sensor_topic(id, sensing::Channel::Rh),
                               {t, "rh", rh.value, rh.ok});
            publisher->enqueue(telemetry::sensor_topic(id, sensing::Channel::Gas),
                               {t, "gas", gas.value, gas.ok});
            for (auto a : kActuators) {
                publisher->enqueue(telemetry::relay_topic(id, a),
                                   {t, std::string(control::to_string(a)),
                                    actuator_on(next_inputs, a) ? 1.0 : 0.0, true});
            }
            publisher->enqueue(telemetry::alarm_topic(id),
                               {t, "alarm", static_cast<double>(ctl.alarm_flags()), true});
        }

        applied = next_inputs;
    }

    rep.final_ledger = ledger;
    rep.total_spoilage_pct = ledger.total_spoilage_pct();
    rep.market_value_loss_pct =
        spoilage::market_value_loss_pct(ledger, s.rates.mold_visible_threshold);
    rep.final_mass_kg = state.onion_mass_kg;

    const double runtime_s = static_cast<double>(ticks) * s.dt_s;
    for (std::size_t i = 0; i < kActuators.size(); ++i) {
        rep.duty_cycle[i] = ticks == 0 ? 0.0 : rep.on_time_s[i] / runtime_s;
        rep.energy_kwh += s.costs.rated_power_w(kActuators[i]) * rep.on_time_s[i] / 3.6e6;
    }

    if (publisher) {
        publisher->close();
        rep.telemetry_sent = publisher->sent();
        rep.telemetry_dropped = publisher->dropped();
    }
    return result;
}

}  // namespace storetwin::harness
