#include "storetwin/compare.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "storetwin/error.hpp"

namespace storetwin::harness {

ComparisonReport compare(const RunReport& baseline, const RunReport& controlled,
                         const CostModel& costs) {
    validate(costs);
    if (std::abs(baseline.duration_s - controlled.duration_s) > 1e-9 * std::max(1.0, baseline.duration_s))
        throw ValidationError(fmt::format("compare: duration mismatch ({} s vs {} s)",
                                          baseline.duration_s, controlled.duration_s));

    ComparisonReport c;
    c.baseline_spoilage_pct = baseline.total_spoilage_pct;
    c.controlled_spoilage_pct = controlled.total_spoilage_pct;
    c.absolute_reduction_pct = baseline.total_spoilage_pct - controlled.total_spoilage_pct;
    c.relative_reduction =
        baseline.total_spoilage_pct > 0.0 ? c.absolute_reduction_pct / baseline.total_spoilage_pct : 0.0;
    c.stored_mass_kg = baseline.initial_mass_kg;
    c.saved_value_inr = c.stored_mass_kg * costs.onion_price_inr_per_kg * c.absolute_reduction_pct / 100.0;
    c.energy_kwh = std::max(0.0, controlled.energy_kwh - baseline.energy_kwh);
    c.energy_cost_inr = c.energy_kwh * costs.energy_price_inr_per_kwh;
    c.net_benefit_inr = c.saved_value_inr - c.energy_cost_inr;
    c.system_capex_inr = costs.system_capex_inr;
    if (c.net_benefit_inr > 0.0) c.payback_seasons = costs.system_capex_inr / c.net_benefit_inr;

    c.table = {
        {"traditional", costs.traditional_capex_inr, baseline.total_spoilage_pct},
        {"iot system", costs.system_capex_inr, controlled.total_spoilage_pct},
        {"cold storage", costs.cold_storage_capex_inr, std::nullopt},
    };
    return c;
}

ComparisonReport run_comparison(const Scenario& scenario) {
    Scenario base = scenario;
    base.controller_enabled = false;
    Scenario ctl = scenario;
    ctl.controller_enabled = true;
    RunOptions opts;
    opts.keep_log = false;
    const auto b = run_scenario(base, opts);
    const auto c = run_scenario(ctl, opts);
    return compare(b.report, c.report, scenario.costs);
}

std::string comparison_to_text(const ComparisonReport& c) {
    std::string s;
    auto out = std::back_inserter(s);
    fmt::format_to(out, "baseline spoilage    {:.2f} %\n", c.baseline_spoilage_pct);
    fmt::format_to(out, "controlled spoilage  {:.2f} %\n", c.controlled_spoilage_pct);
    fmt::format_to(out, "reduction            {:.2f} points ({:.1f} % of baseline loss)\n",
                   c.absolute_reduction_pct, 100.0 * c.relative_reduction);
    fmt::format_to(out, "saved value          {:.0f} INR/season ({:.0f} kg stored)\n",
                   c.saved_value_inr, c.stored_mass_kg);
    fmt::format_to(out, "energy               {:.1f} kWh, {:.0f} INR\n", c.energy_kwh,
                   c.energy_cost_inr);
    if (c.payback_seasons)
        fmt::format_to(out, "payback              {:.2f} seasons\n", *c.payback_seasons);
    else
        fmt::format_to(out, "payback              undefined (no net benefit)\n");
    fmt::format_to(out, "\n{:<14}{:>14}{:>14}\n", "option", "capex INR", "spoilage %");
    for (const auto& row : c.table) {
        fmt::format_to(out, "{:<14}{:>14.0f}{:>14}\n", row.name, row.capex_inr,
                       row.spoilage_pct ? fmt::format("{:.2f}", *row.spoilage_pct) : "n/a");
    }
    return s;
}

std::string comparison_to_json(const ComparisonReport& c) {
    nlohmann::ordered_json j;
    j["baseline_spoilage_pct"] = c.baseline_spoilage_pct;
    j["controlled_spoilage_pct"] = c.controlled_spoilage_pct;
    j["absolute_reduction_pct"] = c.absolute_reduction_pct;
    j["relative_reduction"] = c.relative_reduction;
    j["stored_mass_kg"] = c.stored_mass_kg;
    j["saved_value_inr"] = c.saved_value_inr;
    j["energy_kwh"] = c.energy_kwh;
    j["energy_cost_inr"] = c.energy_cost_inr;
    j["net_benefit_inr"] = c.net_benefit_inr;
    j["payback_seasons"] = c.payback_seasons ? nlohmann::ordered_json(*c.payback_seasons)
                                             : nlohmann::ordered_json(nullptr);
    auto& table = j["table"] = nlohmann::ordered_json::array();
    for (const auto& row : c.table) {
        nlohmann::ordered_json entry;
        entry["option"] = row.name;
        entry["capex_inr"] = row.capex_inr;
        entry["spoilage_pct"] = row.spoilage_pct ? nlohmann::ordered_json(*row.spoilage_pct)
                                                 : nlohmann::ordered_json(nullptr);
        table.push_back(std::move(entry));
    }
    return j.dump(2);
}

}  // namespace storetwin::harness
