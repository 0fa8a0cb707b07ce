#include "storetwin/spoilage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "storetwin/error.hpp"

namespace storetwin::spoilage {

namespace {

constexpr double kSecondsPerDay = 86400.0;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

void require_dt(double dt_s) {
    require_finite(dt_s, "dt_s");
    if (dt_s <= 0.0) throw ValidationError("dt_s must be positive");
}

double clamp_pct(double v) { return std::clamp(v, 0.0, 100.0); }

}  // namespace

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Safe: return "safe";
        case Regime::WeightLoss: return "weight_loss";
        case Regime::Sprouting: return "sprouting";
        case Regime::Rotting: return "rotting";
    }
    return "unknown";
}

double SpoilageLedger::total_spoilage_pct() const noexcept {
    return std::min(100.0, weight_loss_pct + rot_pct + sprout_pct);
}

void validate(const SpoilageRates& r) {
    const double values[] = {r.weight_loss_pct_per_day, r.sprout_pct_per_day, r.rot_pct_per_day,
                             r.rot_pathogen_coupling, r.mold_growth_rate_per_day};
    for (double v : values) {
        require_finite(v, "spoilage rate");
        if (v < 0.0) throw ValidationError("spoilage rates must be >= 0");
    }
    require_finite(r.mold_rh_threshold_pct, "mold_rh_threshold_pct");
    if (r.mold_rh_threshold_pct < 0.0 || r.mold_rh_threshold_pct > 100.0)
        throw ValidationError("mold_rh_threshold_pct must lie in [0, 100]");
    if (!(r.mold_seed > 0.0 && r.mold_seed <= 1.0))
        throw ValidationError("mold_seed must lie in (0, 1]");
    if (!(r.mold_visible_threshold >= 0.0 && r.mold_visible_threshold <= 1.0))
        throw ValidationError("mold_visible_threshold must lie in [0, 1]");
}

Regime classify_regime(double temp_c, double rh_pct) {
    require_finite(temp_c, "temp_c");
    require_finite(rh_pct, "rh_pct");
    const bool hot = temp_c > 32.0;
    if (hot && rh_pct < 60.0) return Regime::WeightLoss;
    if (hot && rh_pct > 70.0) return Regime::Rotting;
    if (temp_c >= 0.0 && temp_c <= 2.0 && rh_pct > 70.0) return Regime::Sprouting;
    return Regime::Safe;
}

double uvc_survival(double intensity_w_m2, double dt_s, double d90_dose_j_m2) {
    require_finite(intensity_w_m2, "intensity_w_m2");
    require_finite(dt_s, "dt_s");
    require_finite(d90_dose_j_m2, "d90_dose_j_m2");
    if (d90_dose_j_m2 <= 0.0) throw ValidationError("d90_dose_j_m2 must be positive");
    if (intensity_w_m2 < 0.0) throw ValidationError("intensity_w_m2 must be >= 0");
    if (dt_s < 0.0) throw ValidationError("dt_s must be >= 0");
    const double fluence = intensity_w_m2 * dt_s;
    return std::pow(10.0, -fluence / d90_dose_j_m2);
}

double step_mold(const SpoilageLedger& ledger, double rh_pct, double uvc_survival_factor,
                 const SpoilageRates& rates, double dt_s) {
    require_dt(dt_s);
    require_finite(rh_pct, "rh_pct");
    require_finite(uvc_survival_factor, "uvc_survival_factor");
    if (uvc_survival_factor < 0.0 || uvc_survival_factor > 1.0)
        throw ValidationError("uvc_survival_factor must lie in [0, 1]");

    double m = std::clamp(ledger.mold_index, 0.0, 1.0);
    if (rh_pct >= rates.mold_rh_threshold_pct) {
        if (m <= 0.0) m = rates.mold_seed;
        const double dt_days = dt_s / kSecondsPerDay;
        m += rates.mold_growth_rate_per_day * m * (1.0 - m) * dt_days;
    }
    m *= uvc_survival_factor;
    return std::clamp(m, 0.0, 1.0);
}

SpoilageLedger step_spoilage(const SpoilageLedger& ledger, double temp_c, double rh_pct,
                             const SpoilageRates& rates, double dt_s) {
    require_dt(dt_s);
    const double dt_days = dt_s / kSecondsPerDay;
    SpoilageLedger next = ledger;

    switch (classify_regime(temp_c, rh_pct)) {
        case Regime::WeightLoss:
            next.weight_loss_pct += rates.weight_loss_pct_per_day * dt_days;
            break;
        case Regime::Sprouting:
            next.sprout_pct += rates.sprout_pct_per_day * dt_days;
            break;
        case Regime::Rotting:
            next.rot_pct += rates.rot_pct_per_day * dt_days;
            break;
        case Regime::Safe:
            break;
    }
    next.rot_pct += rates.rot_pathogen_coupling * std::clamp(ledger.mold_index, 0.0, 1.0) * dt_days;

    next.weight_loss_pct = std::max(ledger.weight_loss_pct, clamp_pct(next.weight_loss_pct));
    next.rot_pct = std::max(ledger.rot_pct, clamp_pct(next.rot_pct));
    next.sprout_pct = std::max(ledger.sprout_pct, clamp_pct(next.sprout_pct));
    return next;
}

double market_value_loss_pct(const SpoilageLedger& ledger, double mold_visible_threshold) {
    const double total = ledger.total_spoilage_pct();
    double loss = total;
    if (ledger.mold_index > mold_visible_threshold)
        loss += kBlackMoldPenalty * (100.0 - total);
    return std::min(100.0, loss);
}

double gas_emission_rate(double delta_rot_pct, double dt_s, double onion_mass_kg,
                         double emission_coeff_ppm_per_pct_kg) {
    require_dt(dt_s);
    if (!(delta_rot_pct >= 0.0) || !(onion_mass_kg >= 0.0) ||
        !(emission_coeff_ppm_per_pct_kg >= 0.0))
        throw ValidationError("gas_emission_rate inputs must be >= 0");
    return emission_coeff_ppm_per_pct_kg * onion_mass_kg * delta_rot_pct / dt_s;
}

}  // namespace storetwin::spoilage
