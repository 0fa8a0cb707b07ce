#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace storetwin::sensing {

/// DHT22 temperature/humidity sensor. Ranges are the datasheet limits.
struct Dht22Model {
    static constexpr double kTempMinC = -40.0;
    static constexpr double kTempMaxC = 80.0;
    static constexpr double kRhMinPct = 0.0;
    static constexpr double kRhMaxPct = 100.0;

    double temp_noise_sd = 0.5;
    double rh_noise_sd = 2.0;
    double temp_resolution = 0.1;
    double rh_resolution = 0.1;
    double min_sample_interval_s = 2.0;
};

/// MQ-135 gas sensor read through a load-resistor divider into an ADC.
/// Rs/R0 = curve_a * ppm^curve_b; the ADC measures the voltage across the
/// load resistor, so counts rise with gas concentration.
struct Mq135Model {
    double r0_ohm = 6660.0;  // clean air (~10 ppm) reads near mid-scale
    double curve_a = 3.6;
    double curve_b = -0.38;
    int adc_bits = 10;
    double adc_vref = 5.0;
    double load_resistor_ohm = 10000.0;
    double rs_noise_sd = 0.05;  // log-normal, applied to Rs
    double detect_min_ppm = 1.0;
    double detect_max_ppm = 1000.0;

    [[nodiscard]] std::uint32_t adc_max() const noexcept {
        return (std::uint32_t{1} << adc_bits) - 1;
    }
};

void validate(const Dht22Model& model);
void validate(const Mq135Model& model);

struct SensorReading {
    double value = 0.0;
    double t_s = 0.0;
    bool ok = true;

    bool operator==(const SensorReading&) const = default;
};

/// Seeded per-channel random stream. Value type; copying forks the stream.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    double gaussian(double sd);

    bool operator==(const RngStream&) const = default;

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// One DHT22 read: noise, clamp to range, round to resolution. Callers must
/// not sample faster than min_sample_interval_s; see Dht22Channel.
std::pair<SensorReading, SensorReading> sample_dht22(double true_temp_c, double true_rh_pct,
                                                     const Dht22Model& model, RngStream& rng,
                                                     double t_s = 0.0);

/// Rate-limited DHT22: re-reads return the cached pair inside the minimum interval.
class Dht22Channel {
public:
    explicit Dht22Channel(Dht22Model model, RngStream rng) : model_(model), rng_(std::move(rng)) {}

    std::pair<SensorReading, SensorReading> read(double true_temp_c, double true_rh_pct,
                                                 double t_s);

private:
    Dht22Model model_;
    RngStream rng_;
    bool has_sample_ = false;
    std::pair<SensorReading, SensorReading> last_{};
};

/// Noiseless forward model: ppm -> ADC counts.
std::uint32_t mq135_counts(double true_ppm, const Mq135Model& model);

/// Forward model with log-normal noise on Rs.
std::uint32_t sample_mq135(double true_ppm, const Mq135Model& model, RngStream& rng);

struct GasEstimate {
    double ppm = 0.0;
    bool ok = true;  // false at the ADC rails
};

/// Algebraic inverse of the noiseless forward model. Rail counts map to the
/// detectable range endpoints (0 -> detect_min_ppm, max -> detect_max_ppm)
/// and are flagged.
GasEstimate adc_to_ppm(std::uint32_t adc_counts, const Mq135Model& model);

enum class Channel { Temp, Rh, Gas };
enum class FaultMode { Stuck, Dropout };

struct FaultWindow {
    Channel channel = Channel::Temp;
    double start_s = 0.0;
    double end_s = 0.0;
    FaultMode mode = FaultMode::Dropout;
};

struct FaultPlan {
    std::vector<FaultWindow> windows;
};

void validate(const FaultPlan& plan);

/// Applies the plan to a fresh reading. `previous` is the last value this
/// channel emitted. Stuck repeats it as a valid reading, dropout repeats it
/// flagged ok=false. Windows are half-open [start, end).
SensorReading apply_faults(const SensorReading& reading, const FaultPlan& plan, Channel channel,
                           const SensorReading& previous);

}  // namespace storetwin::sensing
