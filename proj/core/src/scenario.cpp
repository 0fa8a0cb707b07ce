#include "storetwin/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "storetwin/error.hpp"

namespace storetwin::harness {

namespace {

using nlohmann::json;

constexpr double kSecondsPerDay = 86400.0;

/// Strict view over one JSON object: every key must be consumed.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError(path_ + ": expected an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!obj_.contains(key)) return;
        seen_.insert(key);
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ValidationError("expected a boolean");
                out = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ValidationError("expected a string");
                out = v.get<std::string>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() && !v.is_number_unsigned())
                    throw ValidationError("expected an integer");
                if (v.is_number_unsigned()) {
                    const auto u = v.get<std::uint64_t>();
                    if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
                        throw ValidationError("integer out of range");
                } else {
                    const auto i = v.get<std::int64_t>();
                    if (i < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
                        (i > 0 && static_cast<std::uint64_t>(i) >
                                      static_cast<std::uint64_t>(std::numeric_limits<T>::max())))
                        throw ValidationError("integer out of range");
                }
                out = v.get<T>();
            } else {
                if (!v.is_number()) throw ValidationError("expected a number");
                out = v.get<T>();
                if (!std::isfinite(static_cast<double>(out)))
                    throw ValidationError("expected a finite number");
            }
        } catch (const ValidationError& e) {
            throw ValidationError(path_ + "." + key + ": " + e.what());
        } catch (const json::exception& e) {
            throw ValidationError(path_ + "." + key + ": " + e.what());
        }
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(obj_.at(key), path_ + "." + key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    void finish() const {
        for (const auto& [key, _] : obj_.items())
            if (!seen_.count(key)) throw ValidationError(path_ + ": unknown key '" + key + "'");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

sensing::Channel parse_channel(const std::string& s) {
    if (s == "temp") return sensing::Channel::Temp;
    if (s == "rh") return sensing::Channel::Rh;
    if (s == "gas") return sensing::Channel::Gas;
    throw ValidationError("fault channel must be temp, rh or gas (got '" + s + "')");
}

sensing::FaultMode parse_mode(const std::string& s) {
    if (s == "stuck") return sensing::FaultMode::Stuck;
    if (s == "dropout") return sensing::FaultMode::Dropout;
    throw ValidationError("fault mode must be stuck or dropout (got '" + s + "')");
}

void read_ambient(Section sec, Scenario& s, const std::filesystem::path& base_dir) {
    std::string preset_name;
    std::string csv;
    sec.read("preset", preset_name);
    sec.read("csv", csv);
    if (!preset_name.empty() && !csv.empty())
        throw ValidationError("ambient: give either 'preset' or 'csv', not both");

    if (!csv.empty()) {
        std::filesystem::path p(csv);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        s.ambient = env::AmbientProfile::from_csv_file(p);
        s.ambient_label = "csv:" + csv;
    } else if (preset_name == "monsoon") {
        s.ambient = env::AmbientProfile::monsoon();
        s.ambient_label = "monsoon";
    } else if (preset_name == "constant") {
        double temp_c = 25.0, rh_pct = 65.0;
        sec.read("temp_c", temp_c);
        sec.read("rh_pct", rh_pct);
        s.ambient = env::AmbientProfile::constant(temp_c, rh_pct);
        s.ambient_label = "constant";
    } else if (preset_name == "diurnal") {
        double mean_t = 30.0, amp_t = 6.0, mean_rh = 60.0, amp_rh = 15.0;
        sec.read("mean_temp_c", mean_t);
        sec.read("temp_amplitude_c", amp_t);
        sec.read("mean_rh_pct", mean_rh);
        sec.read("rh_amplitude_pct", amp_rh);
        s.ambient = env::AmbientProfile::diurnal(mean_t, amp_t, mean_rh, amp_rh, s.duration_s);
        s.ambient_label = "diurnal";
    } else {
        throw ValidationError("ambient: unknown preset '" + preset_name + "'");
    }
    sec.finish();
}

Scenario from_json(const json& root, const std::filesystem::path& base_dir) {
    Section top(root, "scenario");

    std::string preset_name = "monsoon";
    top.read("preset", preset_name);
    Scenario s = preset(preset_name);

    top.read("id", s.id);
    if (top.has("duration_s") && top.has("duration_days"))
        throw ValidationError("scenario: give duration_s or duration_days, not both");
    top.read("duration_s", s.duration_s);
    if (top.has("duration_days")) {
        double days = 0.0;
        top.read("duration_days", days);
        s.duration_s = days * kSecondsPerDay;
    }
    top.read("dt_s", s.dt_s);
    top.read("seed", s.seed);
    top.read("controller_enabled", s.controller_enabled);

    // The diurnal generator needs the final duration.
    if (preset_name == "diurnal" && !top.has("ambient"))
        s.ambient = env::AmbientProfile::diurnal(30.0, 6.0, 60.0, 15.0, s.duration_s);
    if (top.has("ambient")) read_ambient(top.child("ambient"), s, base_dir);

    if (top.has("initial")) {
        auto sec = top.child("initial");
        sec.read("temp_c", s.initial.temp_c);
        sec.read("rh_pct", s.initial.rh_pct);
        sec.read("gas_ppm", s.initial.gas_ppm);
        sec.read("onion_mass_kg", s.initial.onion_mass_kg);
        sec.finish();
    }
    if (top.has("chamber")) {
        auto sec = top.child("chamber");
        auto& c = s.chamber;
        sec.read("tau_thermal_s", c.tau_thermal_s);
        sec.read("tau_moisture_s", c.tau_moisture_s);
        sec.read("fan_exchange_multiplier", c.fan_exchange_multiplier);
        sec.read("cooler_effectiveness", c.cooler_effectiveness);
        sec.read("cooler_rh_bias_pct", c.cooler_rh_bias_pct);
        sec.read("dehumidifier_rh_per_hour", c.dehumidifier_rh_per_hour);
        sec.read("gas_vent_fraction_per_step", c.gas_vent_fraction_per_step);
        sec.read("gas_vent_reference_step_s", c.gas_vent_reference_step_s);
        sec.read("volume_m3", c.volume_m3);
        sec.finish();
    }
    if (top.has("spoilage")) {
        auto sec = top.child("spoilage");
        auto& r = s.rates;
        sec.read("weight_loss_pct_per_day", r.weight_loss_pct_per_day);
        sec.read("sprout_pct_per_day", r.sprout_pct_per_day);
        sec.read("rot_pct_per_day", r.rot_pct_per_day);
        sec.read("rot_pathogen_coupling", r.rot_pathogen_coupling);
        sec.read("mold_growth_rate_per_day", r.mold_growth_rate_per_day);
        sec.read("mold_rh_threshold_pct", r.mold_rh_threshold_pct);
        sec.read("mold_seed", r.mold_seed);
        sec.read("mold_visible_threshold", r.mold_visible_threshold);
        sec.read("d90_dose_j_m2", s.d90_dose_j_m2);
        sec.read("uvc_intensity_w_m2", s.uvc_intensity_w_m2);
        sec.read("gas_emission_coeff", s.gas_emission_coeff);
        sec.finish();
    }
    if (top.has("sensors")) {
        auto sensors = top.child("sensors");
        if (sensors.has("dht22")) {
            auto sec = sensors.child("dht22");
            sec.read("temp_noise_sd", s.dht22.temp_noise_sd);
            sec.read("rh_noise_sd", s.dht22.rh_noise_sd);
            sec.read("temp_resolution", s.dht22.temp_resolution);
            sec.read("rh_resolution", s.dht22.rh_resolution);
            sec.read("min_sample_interval_s", s.dht22.min_sample_interval_s);
            sec.finish();
        }
        if (sensors.has("mq135")) {
            auto sec = sensors.child("mq135");
            auto& m = s.mq135;
            sec.read("r0_ohm", m.r0_ohm);
            sec.read("curve_a", m.curve_a);
            sec.read("curve_b", m.curve_b);
            sec.read("adc_bits", m.adc_bits);
            sec.read("adc_vref", m.adc_vref);
            sec.read("load_resistor_ohm", m.load_resistor_ohm);
            sec.read("rs_noise_sd", m.rs_noise_sd);
            sec.read("detect_min_ppm", m.detect_min_ppm);
            sec.read("detect_max_ppm", m.detect_max_ppm);
            sec.finish();
        }
        sensors.finish();
    }
    if (top.has("controller")) {
        auto sec = top.child("controller");
        auto& c = s.controller;
        sec.read("temp_high_on_c", c.temp_high_on_c);
        sec.read("temp_hyst_c", c.temp_hyst_c);
        sec.read("rh_high_on_pct", c.rh_high_on_pct);
        sec.read("rh_hyst_pct", c.rh_hyst_pct);
        sec.read("gas_spike_factor", c.gas_spike_factor);
        sec.read("gas_baseline_window_s", c.gas_baseline_window_s);
        sec.read("gas_abs_floor_ppm", c.gas_abs_floor_ppm);
        sec.read("uvc_max_duty", c.uvc_max_duty);
        sec.read("uvc_min_on_s", c.uvc_min_on_s);
        sec.read("uvc_min_off_s", c.uvc_min_off_s);
        sec.read("actuator_min_on_s", c.actuator_min_on_s);
        sec.read("actuator_min_off_s", c.actuator_min_off_s);
        sec.read("alarm_on_sensor_fault", c.alarm_on_sensor_fault);
        sec.finish();
    }
    if (top.has("faults")) {
        const json& arr = top.raw("faults");
        if (!arr.is_array()) throw ValidationError("scenario.faults: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Section sec(arr[i], "scenario.faults[" + std::to_string(i) + "]");
            std::string channel = "temp", mode = "dropout";
            sensing::FaultWindow w;
            sec.read("channel", channel);
            sec.read("mode", mode);
            sec.read("start_s", w.start_s);
            sec.read("end_s", w.end_s);
            sec.finish();
            w.channel = parse_channel(channel);
            w.mode = parse_mode(mode);
            s.faults.windows.push_back(w);
        }
    }
    if (top.has("telemetry")) {
        auto sec = top.child("telemetry");
        auto& t = s.telemetry;
        sec.read("enabled", t.enabled);
        sec.read("host", t.host);
        sec.read("port", t.port);
        sec.read("store_id", t.store_id);
        sec.read("publish_interval_s", t.publish_interval_s);
        sec.read("queue_capacity", t.queue_capacity);
        sec.finish();
    }
    if (top.has("costs")) {
        auto sec = top.child("costs");
        auto& c = s.costs;
        sec.read("system_capex_inr", c.system_capex_inr);
        sec.read("cold_storage_capex_inr", c.cold_storage_capex_inr);
        sec.read("traditional_capex_inr", c.traditional_capex_inr);
        sec.read("fan_w", c.fan_w);
        sec.read("dehumidifier_w", c.dehumidifier_w);
        sec.read("cooler_w", c.cooler_w);
        sec.read("uvc_w", c.uvc_w);
        sec.read("energy_price_inr_per_kwh", c.energy_price_inr_per_kwh);
        sec.read("onion_price_inr_per_kg", c.onion_price_inr_per_kg);
        sec.finish();
    }
    top.finish();
    validate(s);
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace

double CostModel::rated_power_w(control::Actuator a) const noexcept {
    switch (a) {
        case control::Actuator::Fan: return fan_w;
        case control::Actuator::Dehumidifier: return dehumidifier_w;
        case control::Actuator::Cooler: return cooler_w;
        case control::Actuator::Uvc: return uvc_w;
    }
    return 0.0;
}

void validate(const CostModel& c) {
    const double values[] = {c.system_capex_inr, c.cold_storage_capex_inr, c.traditional_capex_inr,
                             c.fan_w, c.dehumidifier_w, c.cooler_w, c.uvc_w,
                             c.energy_price_inr_per_kwh, c.onion_price_inr_per_kg};
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("costs must be finite and >= 0");
}

void validate(const Scenario& s) {
    if (s.id.empty()) throw ValidationError("scenario.id must not be empty");
    if (!std::isfinite(s.duration_s) || s.duration_s < 0.0)
        throw ValidationError("scenario.duration_s must be >= 0");
    if (!std::isfinite(s.dt_s) || s.dt_s <= 0.0) throw ValidationError("scenario.dt_s must be positive");
    env::validate(s.chamber);
    if (s.dt_s > std::min(s.chamber.tau_thermal_s, s.chamber.tau_moisture_s) / 10.0)
        throw ValidationError("scenario.dt_s exceeds the stability guard min(tau)/10");
    if (s.ambient.empty()) throw ValidationError("scenario.ambient is empty");

    const auto& i = s.initial;
    if (!std::isfinite(i.temp_c) || !(i.rh_pct >= 0.0 && i.rh_pct <= 100.0) || !(i.gas_ppm >= 0.0) ||
        !(i.onion_mass_kg >= 0.0))
        throw ValidationError("scenario.initial: temp finite, rh in [0,100], gas and mass >= 0");

    spoilage::validate(s.rates);
    if (!(s.d90_dose_j_m2 > 0.0)) throw ValidationError("spoilage.d90_dose_j_m2 must be positive");
    if (!(s.uvc_intensity_w_m2 >= 0.0))
        throw ValidationError("spoilage.uvc_intensity_w_m2 must be >= 0");
    if (!(s.gas_emission_coeff >= 0.0))
        throw ValidationError("spoilage.gas_emission_coeff must be >= 0");

    sensing::validate(s.dht22);
    sensing::validate(s.mq135);
    control::validate(s.controller);
    sensing::validate(s.faults);
    validate(s.costs);

    if (s.telemetry.enabled && s.telemetry.store_id.empty())
        throw ValidationError("telemetry.store_id must not be empty");
    if (s.telemetry.store_id.find_first_of("/+#") != std::string::npos)
        throw ValidationError("telemetry.store_id must not contain '/', '+' or '#'");
    if (!(s.telemetry.publish_interval_s > 0.0))
        throw ValidationError("telemetry.publish_interval_s must be positive");
}

Scenario preset(std::string_view name) {
    Scenario s;
    if (name == "monsoon") {
        s.id = "monsoon";
        s.ambient = env::AmbientProfile::monsoon();
        s.ambient_label = "monsoon";
        s.initial = {34.0, 85.0, 5.0, 10'000.0, 0.0};
    } else if (name == "diurnal") {
        s.id = "diurnal";
        s.ambient = env::AmbientProfile::diurnal(30.0, 6.0, 60.0, 15.0, s.duration_s);
        s.ambient_label = "diurnal";
        s.initial = {30.0, 60.0, 5.0, 10'000.0, 0.0};
    } else if (name == "constant") {
        s.id = "constant";
        s.ambient = env::AmbientProfile::constant(25.0, 65.0);
        s.ambient_label = "constant";
        s.initial = {25.0, 65.0, 5.0, 10'000.0, 0.0};
    } else {
        throw ValidationError("unknown preset '" + std::string(name) + "'");
    }
    return s;
}

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
    return from_json(root, base_dir);
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& overlay) {
    json root = read_json_file(path);
    if (overlay) root.merge_patch(read_json_file(*overlay));
    return from_json(root, path.parent_path());
}

}  // namespace storetwin::harness
