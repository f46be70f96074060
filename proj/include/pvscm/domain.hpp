#pragma once

/**
 * @file domain.hpp
 * @brief Shared domain types for PV + battery sizing: tariff/cost parameters,
 *        validated scenarios, sizing estimates and the input error type.
 *
 * Units: energies in kWh per step, irradiation in kWh/m^2 per step, capacities
 * in kW (PV) and kWh (battery), costs in an abstract currency per year.
 * g_stc is stored in kW/m^2 (1.0 == 1000 W/m^2), so that
 *   S_k / g_stc * e_pv * v_pv
 * is the PV output of step k in kWh.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pvscm {

enum class ErrorKind {
    LengthMismatch,
    NegativeValue,
    NonFinite,
    EmptyDay,
    MalformedDays,
    EmptyScenario,
    ParseError,
    MissingColumn,
    InvalidParameter,
    NonViableTariff,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::NegativeValue: return "NegativeValue";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::EmptyDay: return "EmptyDay";
        case ErrorKind::MalformedDays: return "MalformedDays";
        case ErrorKind::EmptyScenario: return "EmptyScenario";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::NonViableTariff: return "NonViableTariff";
    }
    return "Unknown";
}

/// Error raised for any rejected user input (scenario data, parameters, files).
/// `index` carries the 1-based step, row or day the error refers to, when any.
class InputError : public std::runtime_error {
public:
    InputError(ErrorKind kind, std::string message, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::move(message)), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

// =============================================================================
// Tariff and cost parameters
// =============================================================================

/// Economic and technical scalars. Defaults are the base-case household setting.
struct TariffAndCostParams {
    double c_pv_fixed = 12000.0;  ///< annualized PV fixed cost [currency/(kW yr)]
    double c_bat_fixed = 4400.0;  ///< annualized battery fixed cost [currency/(kWh yr)]
    double p_buy = 26.0;          ///< retail price [currency/kWh]
    double p_sell = 6.0;          ///< export price [currency/kWh]
    double e_chg = 0.9;           ///< charging efficiency
    double e_dis = 0.9;           ///< discharging efficiency
    double e_pv = 0.78;           ///< PV performance ratio
    double g_stc = 1.0;           ///< STC irradiance [kW/m^2]
    double m_pv_max = 10.0;       ///< PV capacity cap [kW]
    double delta_p = 0.01;        ///< load slice width [kW]

    friend bool operator==(const TariffAndCostParams&, const TariffAndCostParams&) = default;
};

/// Throws InputError(InvalidParameter) unless every field is in its domain.
inline void validate_params(const TariffAndCostParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InputError(ErrorKind::InvalidParameter, what);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(p.c_pv_fixed) && p.c_pv_fixed >= 0.0, "c_pv_fixed must be finite and >= 0");
    require(finite(p.c_bat_fixed) && p.c_bat_fixed >= 0.0, "c_bat_fixed must be finite and >= 0");
    require(finite(p.p_buy) && p.p_buy >= 0.0, "p_buy must be finite and >= 0");
    require(finite(p.p_sell) && p.p_sell >= 0.0, "p_sell must be finite and >= 0");
    require(p.e_chg > 0.0 && p.e_chg <= 1.0, "e_chg must be in (0, 1]");
    require(p.e_dis > 0.0 && p.e_dis <= 1.0, "e_dis must be in (0, 1]");
    require(p.e_pv > 0.0 && p.e_pv <= 1.0, "e_pv must be in (0, 1]");
    require(finite(p.g_stc) && p.g_stc > 0.0, "g_stc must be > 0");
    require(finite(p.m_pv_max) && p.m_pv_max > 0.0, "m_pv_max must be > 0");
    require(finite(p.delta_p) && p.delta_p > 0.0, "delta_p must be > 0");
}

/// True iff storing PV surplus for later self-consumption can ever pay:
/// p_buy > p_sell / (e_chg * e_dis).
inline bool viability(const TariffAndCostParams& p) {
    return p.p_buy > p.p_sell / (p.e_chg * p.e_dis);
}

// =============================================================================
// Scenario
// =============================================================================

/// Unvalidated scenario input. `day_index` may be left empty, in which case
/// steps are grouped into consecutive blocks of `steps_per_day`.
struct ScenarioCandidate {
    double step_hours = 1.0;
    std::vector<double> demand;       ///< D_k [kWh per step]
    std::vector<double> irradiation;  ///< S_k [kWh/m^2 per step]
    std::vector<int> day_index;       ///< 1-based day of each step
    int steps_per_day = 24;
};

class Scenario;
Scenario validate_scenario(ScenarioCandidate raw);

/// Validated, immutable chronological demand/irradiation series.
class Scenario {
public:
    double step_hours() const noexcept { return step_hours_; }
    const std::vector<double>& demand() const noexcept { return demand_; }
    const std::vector<double>& irradiation() const noexcept { return irradiation_; }
    const std::vector<int>& day_index() const noexcept { return day_index_; }
    std::size_t n_t() const noexcept { return demand_.size(); }
    std::size_t n_d() const noexcept { return day_begin_.size(); }
    /// Annualization factor 365 / n_d.
    double f_anu() const noexcept { return f_anu_; }

    /// Half-open step range [begin, end) of day d (0-based).
    std::pair<std::size_t, std::size_t> day_steps(std::size_t d) const {
        const std::size_t end = d + 1 < day_begin_.size() ? day_begin_[d + 1] : demand_.size();
        return {day_begin_[d], end};
    }

    double total_demand() const noexcept {
        double s = 0.0;
        for (double v : demand_) s += v;
        return s;
    }

    /// Candidate form with an explicit day column; re-validating it yields an equal Scenario.
    ScenarioCandidate to_candidate() const {
        ScenarioCandidate c;
        c.step_hours = step_hours_;
        c.demand = demand_;
        c.irradiation = irradiation_;
        c.day_index = day_index_;
        return c;
    }

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.step_hours_ == b.step_hours_ && a.demand_ == b.demand_ &&
               a.irradiation_ == b.irradiation_ && a.day_index_ == b.day_index_;
    }

private:
    Scenario() = default;
    friend Scenario validate_scenario(ScenarioCandidate raw);

    double step_hours_ = 1.0;
    std::vector<double> demand_;
    std::vector<double> irradiation_;
    std::vector<int> day_index_;
    std::vector<std::size_t> day_begin_;
    double f_anu_ = 1.0;
};

/// Checks lengths, signs and the day partition and returns the validated scenario.
/// Step and day indices in errors are 1-based.
inline Scenario validate_scenario(ScenarioCandidate raw) {
    if (raw.demand.size() != raw.irradiation.size()) {
        throw InputError(ErrorKind::LengthMismatch,
                         "demand has " + std::to_string(raw.demand.size()) + " steps, irradiation has " +
                             std::to_string(raw.irradiation.size()));
    }
    if (raw.demand.empty()) throw InputError(ErrorKind::EmptyScenario, "scenario has no steps");
    if (!(raw.step_hours > 0.0) || !std::isfinite(raw.step_hours)) {
        throw InputError(ErrorKind::InvalidParameter, "step_hours must be > 0");
    }
    const std::size_t n = raw.demand.size();
    for (std::size_t k = 0; k < n; ++k) {
        for (double v : {raw.demand[k], raw.irradiation[k]}) {
            if (!std::isfinite(v)) {
                throw InputError(ErrorKind::NonFinite, "non-finite value at step " + std::to_string(k + 1), k + 1);
            }
            if (v < 0.0) {
                throw InputError(ErrorKind::NegativeValue, "negative value at step " + std::to_string(k + 1), k + 1);
            }
        }
    }

    if (raw.day_index.empty()) {
        if (raw.steps_per_day <= 0) throw InputError(ErrorKind::InvalidParameter, "steps_per_day must be > 0");
        raw.day_index.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            raw.day_index[k] = static_cast<int>(k / static_cast<std::size_t>(raw.steps_per_day)) + 1;
        }
    }
    if (raw.day_index.size() != n) {
        throw InputError(ErrorKind::LengthMismatch, "day_index length differs from the series length");
    }

    Scenario s;
    if (raw.day_index.front() != 1) {
        if (raw.day_index.front() > 1) {
            throw InputError(ErrorKind::EmptyDay, "day 1 has no steps", 1);
        }
        throw InputError(ErrorKind::MalformedDays, "day indices must start at 1", 1);
    }
    s.day_begin_.push_back(0);
    for (std::size_t k = 1; k < n; ++k) {
        const int prev = raw.day_index[k - 1];
        const int cur = raw.day_index[k];
        if (cur < prev) {
            throw InputError(ErrorKind::MalformedDays, "day index decreases at step " + std::to_string(k + 1), k + 1);
        }
        if (cur > prev + 1) {
            throw InputError(ErrorKind::EmptyDay, "day " + std::to_string(prev + 1) + " has no steps",
                             static_cast<std::size_t>(prev + 1));
        }
        if (cur == prev + 1) s.day_begin_.push_back(k);
    }

    s.step_hours_ = raw.step_hours;
    s.demand_ = std::move(raw.demand);
    s.irradiation_ = std::move(raw.irradiation);
    s.day_index_ = std::move(raw.day_index);
    s.f_anu_ = 365.0 / static_cast<double>(s.day_begin_.size());
    return s;
}

// =============================================================================
// Sizing estimate
// =============================================================================

struct SizingEstimate {
    double v_pv = 0.0;                   ///< [kW]
    double v_bat = 0.0;                  ///< [kWh]
    double annualized_total_cost = 0.0;  ///< [currency/yr], includes night/uncovered demand
    std::vector<double> per_day_sold;    ///< [kWh], length n_d
    std::vector<double> per_day_charged; ///< [kWh], length n_d
    int j_star = 0;
    std::size_t installed_slices = 0;
    /// Lower edge [kW] of the first slice where buying from the grid is cheapest.
    std::optional<double> first_crossing_kw;
    std::optional<std::size_t> first_crossing_slice;  ///< 0-based
};

}  // namespace pvscm
