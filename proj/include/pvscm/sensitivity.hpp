#pragma once

/**
 * @file sensitivity.hpp
 * @brief One-parameter sweeps of the SCM estimate (optionally against the LP)
 *        and families of cost curves for a handful of parameter values.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pvscm/domain.hpp"
#include "pvscm/json_io.hpp"
#include "pvscm/lp/oracle.hpp"
#include "pvscm/scm.hpp"

namespace pvscm {

enum class SweepParameter { CPvFixed, CBatFixed, PBuy, PSell };

inline const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::CPvFixed: return "c_pv_fixed";
        case SweepParameter::CBatFixed: return "c_bat_fixed";
        case SweepParameter::PBuy: return "p_buy";
        case SweepParameter::PSell: return "p_sell";
    }
    return "unknown";
}

inline SweepParameter parse_sweep_parameter(std::string_view name) {
    for (auto p : {SweepParameter::CPvFixed, SweepParameter::CBatFixed, SweepParameter::PBuy, SweepParameter::PSell}) {
        if (name == to_string(p)) return p;
    }
    throw InputError(ErrorKind::InvalidParameter,
                     "sweep parameter must be one of c_pv_fixed, c_bat_fixed, p_buy, p_sell; got '" +
                         std::string(name) + "'");
}

inline TariffAndCostParams with_value(TariffAndCostParams p, SweepParameter which, double value) {
    switch (which) {
        case SweepParameter::CPvFixed: p.c_pv_fixed = value; break;
        case SweepParameter::CBatFixed: p.c_bat_fixed = value; break;
        case SweepParameter::PBuy: p.p_buy = value; break;
        case SweepParameter::PSell: p.p_sell = value; break;
    }
    return p;
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::CBatFixed;
    std::vector<double> values;  ///< strictly ascending
    bool with_lp = false;
    TariffAndCostParams base;
    double lp_time_limit_s = 60.0;  ///< per point
    double pv_band_kw = 0.25;       ///< divergence band for |v_pv_SCM - v_pv_LP|
    double bat_band_kwh = 0.5;      ///< divergence band for |v_bat_SCM - v_bat_LP|
    unsigned parallelism = 0;       ///< 0: hardware concurrency
};

inline void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.values.empty()) throw InputError(ErrorKind::InvalidParameter, "sweep values must not be empty");
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double v = spec.values[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw InputError(ErrorKind::InvalidParameter,
                             std::string("sweep value for ") + to_string(spec.parameter) + " must be finite and >= 0",
                             i + 1);
        }
        if (i > 0 && !(v > spec.values[i - 1])) {
            throw InputError(ErrorKind::InvalidParameter, "sweep values must be strictly ascending", i + 1);
        }
    }
    validate_params(spec.base);
    if (!(spec.lp_time_limit_s > 0.0)) throw InputError(ErrorKind::InvalidParameter, "lp time limit must be > 0");
    if (!(spec.pv_band_kw >= 0.0) || !(spec.bat_band_kwh >= 0.0)) {
        throw InputError(ErrorKind::InvalidParameter, "divergence bands must be >= 0");
    }
}

struct LpPoint {
    lp::SolveStatus status = lp::SolveStatus::NumericalFailure;
    double v_pv = 0.0;
    double v_bat = 0.0;
    double objective = 0.0;
    double seconds = 0.0;
};

struct SweepRow {
    double value = 0.0;
    std::optional<std::string> error;  ///< set when the point failed; the SCM fields are then zero
    std::optional<ErrorKind> error_kind;
    double v_pv = 0.0;
    double v_bat = 0.0;
    double cost = 0.0;
    int j_star = 0;
    double scm_seconds = 0.0;
    std::optional<LpPoint> lp;
    bool pv_divergent = false;
    bool bat_divergent = false;
    /// v_bat_SCM - v_bat_LP when an optimal LP is available.
    std::optional<double> bat_gap;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::CBatFixed;
    std::vector<SweepRow> rows;
};

inline SweepRow sweep_point(const Scenario& s, const SweepSpec& spec, double value) {
    SweepRow row;
    row.value = value;
    try {
        const auto params = with_value(spec.base, spec.parameter, value);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = run_scm(s, params);
        row.scm_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.v_pv = r.sizing.v_pv;
        row.v_bat = r.sizing.v_bat;
        row.cost = r.sizing.annualized_total_cost;
        row.j_star = r.sizing.j_star;
        if (spec.with_lp) {
            lp::SimplexOptions opt;
            opt.time_limit_s = spec.lp_time_limit_s;
            const auto sol = lp::solve_sizing(s, params, opt);
            LpPoint lp;
            lp.status = sol.status;
            lp.seconds = sol.seconds;
            if (sol.optimal()) {
                lp.v_pv = sol.v_pv;
                lp.v_bat = sol.v_bat;
                lp.objective = sol.objective;
                row.bat_gap = row.v_bat - sol.v_bat;
                row.pv_divergent = std::abs(row.v_pv - sol.v_pv) > spec.pv_band_kw;
                row.bat_divergent = std::abs(*row.bat_gap) > spec.bat_band_kwh;
            }
            row.lp = lp;
        }
    } catch (const InputError& e) {
        row = SweepRow{};
        row.value = value;
        row.error = e.what();
        row.error_kind = e.kind();
    } catch (const std::exception& e) {
        row = SweepRow{};
        row.value = value;
        row.error = e.what();
    }
    return row;
}

/// Runs every point (concurrently up to `parallelism`). `on_row`, if given, is
/// called on the calling thread in input order as soon as each row and all
/// rows before it are done, which lets callers stream results.
inline SweepResult run_sweep(const Scenario& s, const SweepSpec& spec,
                             const std::function<void(std::size_t, const SweepRow&)>& on_row = {}) {
    validate_sweep_spec(spec);
    const std::size_t n = spec.values.size();
    SweepResult result;
    result.parameter = spec.parameter;
    result.rows.resize(n);

    unsigned workers = spec.parallelism ? spec.parallelism : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::mutex mu;
    std::condition_variable cv;
    std::vector<char> done(n, 0);
    std::size_t next = 0;

    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next == n) return;
                i = next++;
            }
            SweepRow row = sweep_point(s, spec, spec.values[i]);
            {
                std::lock_guard lock(mu);
                result.rows[i] = std::move(row);
                done[i] = 1;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    try {
        for (std::size_t i = 0; i < n; ++i) {
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return done[i] != 0; });
            }
            if (on_row) on_row(i, result.rows[i]);
        }
    } catch (...) {
        // Stop handing out points, let running ones finish, then propagate.
        {
            std::lock_guard lock(mu);
            next = n;
        }
        for (auto& t : pool) t.join();
        throw;
    }
    for (auto& t : pool) t.join();
    return result;
}

// -----------------------------------------------------------------------------
// Curve families
// -----------------------------------------------------------------------------

struct CurveFamilyMember {
    double value = 0.0;
    ScreeningCurveSet curves;
};

struct CurveFamily {
    SweepParameter parameter = SweepParameter::CPvFixed;
    std::vector<CurveFamilyMember> members;
};

inline constexpr std::size_t kMaxFamilySize = 5;

inline CurveFamily curve_family(const Scenario& s, const SweepSpec& spec) {
    validate_sweep_spec(spec);
    if (spec.values.size() > kMaxFamilySize) {
        throw InputError(ErrorKind::InvalidParameter, "a curve family takes at most 5 values");
    }
    CurveFamily fam;
    fam.parameter = spec.parameter;
    // The decomposition does not depend on any swept parameter.
    const auto d = decompose(s, spec.base);
    for (double v : spec.values) fam.members.push_back({v, build_curves(d, s, with_value(spec.base, spec.parameter, v))});
    return fam;
}

/// How far a c_pv_fixed family departs from a pure vertical shift: each
/// member's per-kW c_pv and c_pvbat minus the first member's should equal the
/// change in c_pv_fixed at every slice, and c_grid should not move at all.
struct ShiftCheck {
    double max_pv_deviation = 0.0;     ///< currency/(kW yr)
    double max_pvbat_deviation = 0.0;  ///< currency/(kW yr)
    bool grid_identical = true;
};

inline ShiftCheck check_pv_cost_shift(const CurveFamily& fam) {
    ShiftCheck out;
    if (fam.members.size() < 2) return out;
    const auto& ref = fam.members.front();
    const auto ref_pv = ref.curves.c_pv_per_kw();
    const auto ref_pvbat = ref.curves.c_pvbat_per_kw();
    for (std::size_t m = 1; m < fam.members.size(); ++m) {
        const auto& cur = fam.members[m];
        const double delta = fam.parameter == SweepParameter::CPvFixed ? cur.value - ref.value : 0.0;
        const auto pv = cur.curves.c_pv_per_kw();
        const auto pvbat = cur.curves.c_pvbat_per_kw();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            out.max_pv_deviation = std::max(out.max_pv_deviation, std::abs(pv[i] - ref_pv[i] - delta));
            out.max_pvbat_deviation = std::max(out.max_pvbat_deviation, std::abs(pvbat[i] - ref_pvbat[i] - delta));
        }
        if (cur.curves.c_grid != ref.curves.c_grid) out.grid_identical = false;
    }
    return out;
}

// -----------------------------------------------------------------------------
// Serialization
// -----------------------------------------------------------------------------

/// Reads {"parameter", "values", "with_lp"?, "params"?, "lp_timeout_s"?,
/// "pv_band_kw"?, "bat_band_kwh"?, "parallelism"?}.
inline SweepSpec sweep_spec_from_json(const nlohmann::json& j, const TariffAndCostParams& base = {}) {
    if (!j.is_object()) throw InputError(ErrorKind::InvalidParameter, "sweep spec must be a JSON object");
    SweepSpec spec;
    try {
        spec.parameter = parse_sweep_parameter(j.at("parameter").get<std::string>());
        if (!j.contains("values") || !j["values"].is_array()) {
            throw InputError(ErrorKind::InvalidParameter, "sweep spec needs a 'values' array");
        }
        for (const auto& v : j["values"]) {
            if (!v.is_number()) throw InputError(ErrorKind::InvalidParameter, "sweep values must be numbers");
            spec.values.push_back(v.get<double>());
        }
        spec.with_lp = j.value("with_lp", false);
        spec.base = params_from_json(j.value("params", nlohmann::json()), base);
        spec.lp_time_limit_s = j.value("lp_timeout_s", spec.lp_time_limit_s);
        spec.pv_band_kw = j.value("pv_band_kw", spec.pv_band_kw);
        spec.bat_band_kwh = j.value("bat_band_kwh", spec.bat_band_kwh);
        spec.parallelism = j.value("parallelism", spec.parallelism);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(ErrorKind::InvalidParameter, std::string("sweep spec: ") + e.what());
    }
    validate_sweep_spec(spec);
    return spec;
}

inline nlohmann::json to_json(const SweepRow& r) {
    nlohmann::json j{{"value", r.value}};
    if (r.error) {
        j["error"] = r.error_kind ? to_string(*r.error_kind) : "InternalError";
        j["message"] = *r.error;
        return j;
    }
    j["scm"] = {{"v_pv_kw", r.v_pv}, {"v_bat_kwh", r.v_bat}, {"annual_cost", r.cost}, {"j_star", r.j_star},
                {"seconds", r.scm_seconds}};
    if (r.lp) {
        nlohmann::json l{{"status", lp::to_string(r.lp->status)}, {"seconds", r.lp->seconds}};
        if (r.lp->status == lp::SolveStatus::Optimal) {
            l["v_pv_kw"] = r.lp->v_pv;
            l["v_bat_kwh"] = r.lp->v_bat;
            l["objective"] = r.lp->objective;
        }
        j["lp"] = l;
        j["pv_divergent"] = r.pv_divergent;
        j["bat_divergent"] = r.bat_divergent;
    }
    return j;
}

inline nlohmann::json to_json(const SweepResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    return {{"parameter", to_string(r.parameter)}, {"rows", rows}};
}

/// Timings are left out so that the file is a pure function of the inputs.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << to_string(r.parameter)
        << ",scm_v_pv_kw,scm_v_bat_kwh,scm_annual_cost,j_star,lp_status,lp_v_pv_kw,lp_v_bat_kwh,lp_objective,"
           "pv_divergent,bat_divergent,error\n";
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto& row : r.rows) {
        out << num(row.value) << ',';
        if (row.error) {
            out << ",,,,,,,,,," << (row.error_kind ? to_string(*row.error_kind) : "InternalError") << '\n';
            continue;
        }
        out << num(row.v_pv) << ',' << num(row.v_bat) << ',' << num(row.cost) << ',' << row.j_star << ',';
        if (row.lp) {
            out << lp::to_string(row.lp->status) << ',';
            if (row.lp->status == lp::SolveStatus::Optimal) {
                out << num(row.lp->v_pv) << ',' << num(row.lp->v_bat) << ',' << num(row.lp->objective);
            } else {
                out << ",,";
            }
            out << ',' << (row.pv_divergent ? 1 : 0) << ',' << (row.bat_divergent ? 1 : 0) << ",\n";
        } else {
            out << ",,,,,,\n";
        }
    }
}

}  // namespace pvscm
