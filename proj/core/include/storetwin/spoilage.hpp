#pragma once

/**
 * @file spoilage.hpp
 * @brief Crop damage accounting for stored onions.
 *
 * The environment is classified into the abiotic damage regimes
 * (weight loss, sprouting, rotting). Each active regime accrues its
 * percentage per day. A single mold population (black mold / Fusarium
 * proxy) grows logistically in humid air, is inactivated by UV-C, and
 * drives additional rot independent of the regime.
 */

#include <string_view>

namespace storetwin::spoilage {

enum class Regime { Safe, WeightLoss, Sprouting, Rotting };

std::string_view to_string(Regime r) noexcept;

struct SpoilageLedger {
    double weight_loss_pct = 0.0;
    double rot_pct = 0.0;
    double sprout_pct = 0.0;
    double mold_index = 0.0;  // 0 = clean, 1 = fully colonized

    /// Sum of the three categories, capped at 100. Overlap is ignored.
    [[nodiscard]] double total_spoilage_pct() const noexcept;

    bool operator==(const SpoilageLedger&) const = default;
};

struct PathogenPopulation {
    double rel_cfu = 1.0;
    double d90_dose_j_m2 = 40.0;
};

struct SpoilageRates {
    double weight_loss_pct_per_day = 0.30;
    double sprout_pct_per_day = 0.20;
    // Calibrated so the uncontrolled 90-day monsoon store lands in the
    // 40-45 % wastage band (see `storetwin calibrate`).
    double rot_pct_per_day = 0.1953125;
    double rot_pathogen_coupling = 0.45;  // rot %/day per unit mold_index
    double mold_growth_rate_per_day = 0.20;
    double mold_rh_threshold_pct = 75.0;
    double mold_seed = 0.001;
    double mold_visible_threshold = 0.1;
};

/// Throws ValidationError for negative rates or thresholds outside their ranges.
void validate(const SpoilageRates& rates);

/// Regime boundaries: >32 C with <60 %RH loses weight, 0-2 C with >70 %RH
/// sprouts, >32 C with >70 %RH rots. Anything else is Safe.
Regime classify_regime(double temp_c, double rh_pct);

/// Survival fraction after a UV-C exposure of intensity * dt_s (J/m^2),
/// log-linear in fluence: 10^(-fluence / d90).
double uvc_survival(double intensity_w_m2, double dt_s, double d90_dose_j_m2);

/// Next mold index. Grows logistically only at rh >= the mold threshold,
/// seeding from mold_seed when the crop is clean, then applies the UV-C kill.
double step_mold(const SpoilageLedger& ledger, double rh_pct, double uvc_survival_factor,
                 const SpoilageRates& rates, double dt_s);

/// Accrues the active regime's rate plus pathogen-driven rot. The mold index
/// of the input ledger is carried through unchanged.
SpoilageLedger step_spoilage(const SpoilageLedger& ledger, double temp_c, double rh_pct,
                             const SpoilageRates& rates, double dt_s);

inline constexpr double kBlackMoldPenalty = 0.275;

/// Total spoilage plus the black-mold price penalty on the unspoiled
/// remainder once mold is visible. Capped at 100.
double market_value_loss_pct(const SpoilageLedger& ledger,
                             double mold_visible_threshold = 0.1);

inline constexpr double kDefaultEmissionCoeff = 1.0e-3;  // ppm per (% rot * kg)

/// Spoilage-gas source term (ppm/s) from rot accrued over the last dt_s.
double gas_emission_rate(double delta_rot_pct, double dt_s, double onion_mass_kg,
                         double emission_coeff_ppm_per_pct_kg = kDefaultEmissionCoeff);

}  // namespace storetwin::spoilage
