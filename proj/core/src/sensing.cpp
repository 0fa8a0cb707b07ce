#include "storetwin/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "storetwin/error.hpp"

namespace storetwin::sensing {

namespace {

double quantize(double v, double resolution) { return std::round(v / resolution) * resolution; }

double sensor_resistance(double ppm, const Mq135Model& m) {
    return m.r0_ohm * m.curve_a * std::pow(ppm, m.curve_b);
}

std::uint32_t divider_counts(double rs_ohm, const Mq135Model& m) {
    const double max = static_cast<double>(m.adc_max());
    // ppm = 0 gives an infinite Rs and therefore zero volts.
    const double ratio = std::isinf(rs_ohm) ? 0.0 : m.load_resistor_ohm / (m.load_resistor_ohm + rs_ohm);
    return static_cast<std::uint32_t>(std::clamp(std::round(ratio * max), 0.0, max));
}

}  // namespace

void validate(const Dht22Model& m) {
    if (!(m.temp_noise_sd >= 0.0) || !(m.rh_noise_sd >= 0.0))
        throw ValidationError("dht22 noise sd must be >= 0");
    if (!(m.temp_resolution > 0.0) || !(m.rh_resolution > 0.0))
        throw ValidationError("dht22 resolution must be positive");
    if (!(m.min_sample_interval_s >= 0.0))
        throw ValidationError("dht22 min_sample_interval_s must be >= 0");
}

void validate(const Mq135Model& m) {
    if (!(m.r0_ohm > 0.0) || !(m.load_resistor_ohm > 0.0) || !(m.curve_a > 0.0))
        throw ValidationError("mq135 r0, load resistor and curve_a must be positive");
    if (!(m.curve_b < 0.0)) throw ValidationError("mq135 curve_b must be negative");
    if (m.adc_bits < 1 || m.adc_bits > 24) throw ValidationError("mq135 adc_bits must be 1..24");
    if (!(m.adc_vref > 0.0)) throw ValidationError("mq135 adc_vref must be positive");
    if (!(m.rs_noise_sd >= 0.0)) throw ValidationError("mq135 rs_noise_sd must be >= 0");
    if (!(m.detect_min_ppm > 0.0) || !(m.detect_max_ppm > m.detect_min_ppm))
        throw ValidationError("mq135 detect range must satisfy 0 < min < max");
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
}

double RngStream::gaussian(double sd) {
    const double z = normal_(engine_);
    return sd == 0.0 ? 0.0 : sd * z;
}

std::pair<SensorReading, SensorReading> sample_dht22(double true_temp_c, double true_rh_pct,
                                                     const Dht22Model& model, RngStream& rng,
                                                     double t_s) {
    const double t_noise = rng.gaussian(model.temp_noise_sd);
    const double rh_noise = rng.gaussian(model.rh_noise_sd);

    double temp = std::clamp(true_temp_c + t_noise, Dht22Model::kTempMinC, Dht22Model::kTempMaxC);
    double rh = std::clamp(true_rh_pct + rh_noise, Dht22Model::kRhMinPct, Dht22Model::kRhMaxPct);
    temp = std::clamp(quantize(temp, model.temp_resolution), Dht22Model::kTempMinC,
                      Dht22Model::kTempMaxC);
    rh = std::clamp(quantize(rh, model.rh_resolution), Dht22Model::kRhMinPct,
                    Dht22Model::kRhMaxPct);
    return {SensorReading{temp, t_s, true}, SensorReading{rh, t_s, true}};
}

std::pair<SensorReading, SensorReading> Dht22Channel::read(double true_temp_c,
                                                           double true_rh_pct, double t_s) {
    if (has_sample_ && t_s - last_.first.t_s < model_.min_sample_interval_s) return last_;
    last_ = sample_dht22(true_temp_c, true_rh_pct, model_, rng_, t_s);
    has_sample_ = true;
    return last_;
}

std::uint32_t mq135_counts(double true_ppm, const Mq135Model& model) {
    if (!(true_ppm >= 0.0)) throw ValidationError("mq135: ppm must be >= 0");
    return divider_counts(sensor_resistance(true_ppm, model), model);
}

std::uint32_t sample_mq135(double true_ppm, const Mq135Model& model, RngStream& rng) {
    if (!(true_ppm >= 0.0)) throw ValidationError("mq135: ppm must be >= 0");
    const double rs = sensor_resistance(true_ppm, model) * std::exp(rng.gaussian(model.rs_noise_sd));
    return divider_counts(rs, model);
}

GasEstimate adc_to_ppm(std::uint32_t adc_counts, const Mq135Model& model) {
    const std::uint32_t max = model.adc_max();
    if (adc_counts > max) throw ValidationError("mq135: adc counts out of range");
    if (adc_counts == 0) return {model.detect_min_ppm, false};
    if (adc_counts == max) return {model.detect_max_ppm, false};

    const double ratio = static_cast<double>(adc_counts) / static_cast<double>(max);
    const double rs = model.load_resistor_ohm * (1.0 / ratio - 1.0);
    const double ppm = std::pow(rs / (model.r0_ohm * model.curve_a), 1.0 / model.curve_b);
    return {ppm, true};
}

void validate(const FaultPlan& plan) {
    for (const auto& w : plan.windows) {
        if (!std::isfinite(w.start_s) || !std::isfinite(w.end_s) || !(w.start_s < w.end_s))
            throw ValidationError("fault window needs start < end");
    }
}

SensorReading apply_faults(const SensorReading& reading, const FaultPlan& plan, Channel channel,
                           const SensorReading& previous) {
    for (const auto& w : plan.windows) {
        if (w.channel != channel || reading.t_s < w.start_s || reading.t_s >= w.end_s) continue;
        switch (w.mode) {
            case FaultMode::Stuck: return {previous.value, reading.t_s, true};
            case FaultMode::Dropout: return {previous.value, reading.t_s, false};
        }
    }
    return reading;
}

}  // namespace storetwin::sensing
