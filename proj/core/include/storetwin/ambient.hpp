#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "storetwin/env_sim.hpp"

namespace storetwin::env {

struct AmbientPoint {
    double t_s = 0.0;
    double temp_c = 0.0;
    double rh_pct = 0.0;
};

/// Piecewise-linear weather trace. Sample times are strictly increasing.
class AmbientProfile {
public:
    AmbientProfile() = default;
    explicit AmbientProfile(std::vector<AmbientPoint> samples);

    [[nodiscard]] const std::vector<AmbientPoint>& samples() const noexcept { return samples_; }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

    /// CSV with header `t_s,temp_c,rh_pct`.
    static AmbientProfile from_csv(std::istream& in);
    static AmbientProfile from_csv_file(const std::filesystem::path& path);

    static AmbientProfile constant(double temp_c, double rh_pct);
    /// Sinusoidal day cycle; humidity peaks when temperature bottoms out.
    static AmbientProfile diurnal(double mean_temp_c, double temp_amplitude_c, double mean_rh_pct,
                                  double rh_amplitude_pct, double duration_s,
                                  double sample_step_s = 900.0);
    /// Hot, saturated monsoon store: 34 C / 85 %RH.
    static AmbientProfile monsoon();

private:
    std::vector<AmbientPoint> samples_;
};

/// Linear interpolation, clamped to the first/last sample outside the covered range.
AmbientSample ambient_at(const AmbientProfile& profile, double t_s);

}  // namespace storetwin::env
