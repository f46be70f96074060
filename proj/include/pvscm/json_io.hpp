#pragma once

// JSON mapping for parameters and results, plus the significant-digit rounding
// applied to every number the service emits.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pvscm/domain.hpp"
#include "pvscm/lp/oracle.hpp"
#include "pvscm/scm.hpp"

namespace pvscm {

/// Rounds to `digits` significant digits (decimal, via printf's %g).
inline double round_sig(double v, int digits = 6) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

/// Copy of `j` with every floating-point number rounded by round_sig.
inline nlohmann::json rounded(const nlohmann::json& j, int digits = 6) {
    switch (j.type()) {
        case nlohmann::json::value_t::number_float: return round_sig(j.get<double>(), digits);
        case nlohmann::json::value_t::array: {
            auto out = nlohmann::json::array();
            for (const auto& e : j) out.push_back(rounded(e, digits));
            return out;
        }
        case nlohmann::json::value_t::object: {
            auto out = nlohmann::json::object();
            for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value(), digits);
            return out;
        }
        default: return j;
    }
}

inline void to_json(nlohmann::json& j, const TariffAndCostParams& p) {
    j = nlohmann::json{{"c_pv_fixed", p.c_pv_fixed}, {"c_bat_fixed", p.c_bat_fixed}, {"p_buy", p.p_buy},
                       {"p_sell", p.p_sell},         {"e_chg", p.e_chg},             {"e_dis", p.e_dis},
                       {"e_pv", p.e_pv},             {"g_stc", p.g_stc},             {"m_pv_max", p.m_pv_max},
                       {"delta_p", p.delta_p}};
}

/// Overrides `base` with the keys present in `j`. Unknown keys and
/// non-numeric values are rejected so that typos do not silently fall back to
/// defaults. The result is validated.
inline TariffAndCostParams params_from_json(const nlohmann::json& j, TariffAndCostParams base = {}) {
    if (j.is_null()) {
        validate_params(base);
        return base;
    }
    if (!j.is_object()) throw InputError(ErrorKind::InvalidParameter, "params must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (!it.value().is_number()) {
            throw InputError(ErrorKind::InvalidParameter, "parameter '" + key + "' must be a number");
        }
        const double v = it.value().get<double>();
        if (key == "c_pv_fixed") base.c_pv_fixed = v;
        else if (key == "c_bat_fixed") base.c_bat_fixed = v;
        else if (key == "p_buy") base.p_buy = v;
        else if (key == "p_sell") base.p_sell = v;
        else if (key == "e_chg") base.e_chg = v;
        else if (key == "e_dis") base.e_dis = v;
        else if (key == "e_pv") base.e_pv = v;
        else if (key == "g_stc") base.g_stc = v;
        else if (key == "m_pv_max") base.m_pv_max = v;
        else if (key == "delta_p") base.delta_p = v;
        else throw InputError(ErrorKind::InvalidParameter, "unknown parameter '" + key + "'");
    }
    validate_params(base);
    return base;
}

inline nlohmann::json error_json(const InputError& e) {
    nlohmann::json j{{"error", to_string(e.kind())}, {"message", e.what()}};
    if (e.index()) j["index"] = *e.index();
    return j;
}

inline nlohmann::json sizing_json(const SizingEstimate& s) {
    nlohmann::json j{{"v_pv_kw", s.v_pv},
                     {"v_bat_kwh", s.v_bat},
                     {"annual_cost", s.annualized_total_cost},
                     {"j_star", s.j_star},
                     {"installed_slices", s.installed_slices}};
    j["first_crossing_kw"] = s.first_crossing_kw ? nlohmann::json(*s.first_crossing_kw) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json profile_json(const SizingEstimate& s) {
    return {{"sold_kwh", s.per_day_sold}, {"charged_kwh", s.per_day_charged}};
}

/// Per-kW curves as plotted, plus battery amounts.
inline nlohmann::json curves_json(const ScreeningCurveSet& c) {
    return {{"slice_level_kw", c.level_kw},
            {"c_grid", c.c_grid_per_kw()},
            {"c_pv", c.c_pv_per_kw()},
            {"c_pvbat", c.c_pvbat_per_kw()},
            {"q_bat", c.q_bat},
            {"cumulative_battery", c.cumulative_battery()},
            {"j_star", c.j_star}};
}

inline nlohmann::json lp_json(const lp::LpSolution& s) {
    nlohmann::json j{{"status", lp::to_string(s.status)}, {"seconds", s.seconds}, {"iterations", s.iterations}};
    if (s.optimal()) {
        j["v_pv_kw"] = s.v_pv;
        j["v_bat_kwh"] = s.v_bat;
        j["objective"] = s.objective;
    }
    return j;
}

}  // namespace pvscm
