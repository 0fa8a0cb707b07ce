#include "storetwin/calibrate.hpp"

#include <fmt/format.h>

#include <cmath>

#include "storetwin/error.hpp"
#include "storetwin/runner.hpp"

namespace storetwin::harness {

namespace {

double total_at(Scenario s, double rate) {
    s.rates.rot_pct_per_day = rate;
    RunOptions opts;
    opts.keep_log = false;
    return run_scenario(s, opts).report.total_spoilage_pct;
}

}  // namespace

CalibrationResult calibrate_rot_rate(const Scenario& scenario, double target_low,
                                     double target_high) {
    if (scenario.controller_enabled)
        throw ValidationError("calibrate: scenario must have the controller disabled");
    if (!std::isfinite(target_low) || !std::isfinite(target_high) || target_low > target_high)
        throw ValidationError("calibrate: target band must satisfy low <= high");
    validate(scenario);

    auto in_band = [&](double v) { return v >= target_low && v <= target_high; };

    double lo = kRotRateLow;
    double hi = kRotRateHigh;
    const double f_lo = total_at(scenario, lo);
    if (in_band(f_lo)) return {lo, f_lo, 0};
    const double f_hi = total_at(scenario, hi);
    if (in_band(f_hi)) return {hi, f_hi, 0};
    if (f_lo > target_high || f_hi < target_low)
        throw CalibrationError(fmt::format(
            "calibrate: band [{}, {}] unreachable; total spoilage spans [{:.3f}, {:.3f}] over "
            "rot rate [{}, {}] %/day",
            target_low, target_high, f_lo, f_hi, kRotRateLow, kRotRateHigh));

    for (std::size_t i = 1; i <= kMaxCalibrationIterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = total_at(scenario, mid);
        if (in_band(f)) return {mid, f, i};
        if (f < target_low)
            lo = mid;
        else
            hi = mid;
    }
    throw CalibrationError(fmt::format("calibrate: no rate in band after {} iterations",
                                       kMaxCalibrationIterations));
}

}  // namespace storetwin::harness
