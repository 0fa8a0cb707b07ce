#pragma once

#include <cstddef>
#include <stdexcept>

#include "storetwin/scenario.hpp"

namespace storetwin::harness {

/// The band cannot be reached with rot_pct_per_day in the search bounds.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationResult {
    double rot_pct_per_day = 0.0;
    double total_spoilage_pct = 0.0;
    std::size_t iterations = 0;  // scenario runs spent inside the bisection
};

inline constexpr double kRotRateLow = 0.0;
inline constexpr double kRotRateHigh = 5.0;
inline constexpr std::size_t kMaxCalibrationIterations = 40;

/// Bisects rot_pct_per_day over [0, 5] until the baseline total spoilage
/// lands in [target_low, target_high]. The scenario must have its
/// controller disabled.
CalibrationResult calibrate_rot_rate(const Scenario& scenario, double target_low,
                                     double target_high);

}  // namespace storetwin::harness
