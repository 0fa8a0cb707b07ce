#include "storetwin/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "storetwin/error.hpp"

namespace storetwin::env {

namespace {

double parse_field(const std::string& text, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ValidationError("ambient csv line " + std::to_string(line_no) +
                              ": bad number '" + text + "'");
    return v;
}

}  // namespace

AmbientProfile::AmbientProfile(std::vector<AmbientPoint> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t_s) || !std::isfinite(s.temp_c) || !std::isfinite(s.rh_pct))
            throw ValidationError("ambient sample must be finite");
        if (s.rh_pct < 0.0 || s.rh_pct > 100.0)
            throw ValidationError("ambient rh_pct must lie in [0, 100]");
        if (i > 0 && !(s.t_s > samples_[i - 1].t_s))
            throw ValidationError("ambient sample times must be strictly increasing");
    }
}

AmbientProfile AmbientProfile::from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("ambient csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_s,temp_c,rh_pct")
        throw ValidationError("ambient csv header must be 't_s,temp_c,rh_pct'");

    std::vector<AmbientPoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string a, b, c, extra;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') ||
            !std::getline(row, c, ',') || std::getline(row, extra, ','))
            throw ValidationError("ambient csv line " + std::to_string(line_no) +
                                  ": expected 3 fields");
        points.push_back({parse_field(a, line_no), parse_field(b, line_no),
                          parse_field(c, line_no)});
    }
    if (points.empty()) throw ValidationError("ambient csv has no samples");
    return AmbientProfile(std::move(points));
}

AmbientProfile AmbientProfile::from_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open ambient csv " + path.string());
    return from_csv(in);
}

AmbientProfile AmbientProfile::constant(double temp_c, double rh_pct) {
    return AmbientProfile({{0.0, temp_c, rh_pct}});
}

AmbientProfile AmbientProfile::diurnal(double mean_temp_c, double temp_amplitude_c,
                                       double mean_rh_pct, double rh_amplitude_pct,
                                       double duration_s, double sample_step_s) {
    if (!(duration_s >= 0.0) || !(sample_step_s > 0.0))
        throw ValidationError("diurnal profile needs duration >= 0 and step > 0");
    constexpr double kDay = 86400.0;
    // Afternoon peak at 15:00.
    constexpr double kPeakS = 15.0 * 3600.0;
    std::vector<AmbientPoint> pts;
    const auto n = static_cast<std::size_t>(std::ceil(duration_s / sample_step_s));
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * sample_step_s;
        const double phase = std::cos(2.0 * std::numbers::pi * (t - kPeakS) / kDay);
        const double rh = std::clamp(mean_rh_pct - rh_amplitude_pct * phase, 0.0, 100.0);
        pts.push_back({t, mean_temp_c + temp_amplitude_c * phase, rh});
    }
    return AmbientProfile(std::move(pts));
}

AmbientProfile AmbientProfile::monsoon() { return constant(34.0, 85.0); }

AmbientSample ambient_at(const AmbientProfile& profile, double t_s) {
    const auto& s = profile.samples();
    if (s.empty()) throw ValidationError("ambient profile is empty");
    if (t_s <= s.front().t_s) return {s.front().temp_c, s.front().rh_pct};
    if (t_s >= s.back().t_s) return {s.back().temp_c, s.back().rh_pct};

    const auto hi = std::upper_bound(s.begin(), s.end(), t_s,
                                     [](double t, const AmbientPoint& p) { return t < p.t_s; });
    const auto lo = hi - 1;
    const double w = (t_s - lo->t_s) / (hi->t_s - lo->t_s);
    return {lo->temp_c + w * (hi->temp_c - lo->temp_c), lo->rh_pct + w * (hi->rh_pct - lo->rh_pct)};
}

}  // namespace storetwin::env
