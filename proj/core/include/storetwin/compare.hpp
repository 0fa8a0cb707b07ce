#pragma once

#include <optional>
#include <string>
#include <vector>

#include "storetwin/runner.hpp"
#include "storetwin/scenario.hpp"

namespace storetwin::harness {

struct StorageOption {
    std::string name;
    double capex_inr = 0.0;
    std::optional<double> spoilage_pct;  // empty when not simulated
};

struct ComparisonReport {
    double baseline_spoilage_pct = 0.0;
    double controlled_spoilage_pct = 0.0;
    double absolute_reduction_pct = 0.0;  // percentage points
    double relative_reduction = 0.0;      // fraction of baseline loss avoided
    double stored_mass_kg = 0.0;
    double saved_value_inr = 0.0;
    double energy_kwh = 0.0;              // extra energy used by the controlled run
    double energy_cost_inr = 0.0;
    double net_benefit_inr = 0.0;         // saved value minus energy cost
    double system_capex_inr = 0.0;
    /// Seasons to recover capex. Empty when the net benefit is not positive.
    std::optional<double> payback_seasons;
    std::vector<StorageOption> table;  // traditional, this system, cold storage
};

/// Throws ValidationError when the two runs cover different durations.
ComparisonReport compare(const RunReport& baseline, const RunReport& controlled,
                         const CostModel& costs);

/// Runs the scenario with the controller off and on (same seed) and compares.
ComparisonReport run_comparison(const Scenario& scenario);

std::string comparison_to_text(const ComparisonReport& c);
std::string comparison_to_json(const ComparisonReport& c);

}  // namespace storetwin::harness
