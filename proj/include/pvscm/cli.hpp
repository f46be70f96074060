#pragma once

/**
 * @file cli.hpp
 * @brief The `pvscm` command line: size, curves, sensitivity, compare,
 *        classic and serve.
 *
 * Exit codes: 0 ok, 2 input error (a JSON error object is printed on stderr),
 * 3 internal error. Output files are written to --out; any run-dependent
 * values (timestamps, wall times) live under a "metadata" key so that the rest
 * of each file is reproducible byte for byte.
 */

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvscm/classical.hpp"
#include "pvscm/domain.hpp"
#include "pvscm/ingest.hpp"
#include "pvscm/json_io.hpp"
#include "pvscm/lp/model.hpp"
#include "pvscm/lp/oracle.hpp"
#include "pvscm/scm.hpp"
#include "pvscm/sensitivity.hpp"
#include "pvscm/service.hpp"
#include "pvscm/svg.hpp"

// After the Eigen-based headers: <resolv.h>, pulled in by httplib, defines a
// `_res` macro that clashes with Eigen parameter names.
#include <httplib.h>

namespace pvscm::cli {

struct RunConfig {
    std::string subcommand;
    std::string csv_path;
    std::string synthetic_path;
    std::string demand_col = "demand_kwh";
    std::string irr_col = "irradiation_kwh_m2";
    std::string day_col;
    int steps_per_day = 24;

    std::optional<double> delta_p, c_pv, c_bat, p_buy, p_sell, e_chg, e_dis, e_pv, g_stc, m_pv;

    std::string out_dir = ".";
    std::vector<std::string> formats;  ///< empty: every format the subcommand supports
    bool with_lp = false;
    std::string export_lp;
    double lp_timeout_s = 600.0;

    // sensitivity
    std::string sweep_path;
    std::string sweep_param;
    std::vector<double> sweep_values;
    bool family = false;

    // classic
    std::vector<std::string> techs;

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t store_capacity = 64;
    std::string ui_dir;
};

inline TariffAndCostParams params_of(const RunConfig& c) {
    TariffAndCostParams p;
    if (c.delta_p) p.delta_p = *c.delta_p;
    if (c.c_pv) p.c_pv_fixed = *c.c_pv;
    if (c.c_bat) p.c_bat_fixed = *c.c_bat;
    if (c.p_buy) p.p_buy = *c.p_buy;
    if (c.p_sell) p.p_sell = *c.p_sell;
    if (c.e_chg) p.e_chg = *c.e_chg;
    if (c.e_dis) p.e_dis = *c.e_dis;
    if (c.e_pv) p.e_pv = *c.e_pv;
    if (c.g_stc) p.g_stc = *c.g_stc;
    if (c.m_pv) p.m_pv_max = *c.m_pv;
    validate_params(p);
    return p;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scenario load_scenario(const RunConfig& c) {
    const bool has_csv = !c.csv_path.empty();
    const bool has_syn = !c.synthetic_path.empty();
    if (has_csv == has_syn) {
        throw InputError(ErrorKind::InvalidParameter, "give exactly one input source: --csv or --synthetic");
    }
    if (has_syn) return generate_synthetic(parse_synthetic_spec(read_file(c.synthetic_path)));
    ColumnMap cols;
    cols.demand = c.demand_col;
    cols.irradiation = c.irr_col;
    if (!c.day_col.empty()) cols.day = c.day_col;
    cols.steps_per_day = c.steps_per_day;
    return parse_csv(read_file(c.csv_path), cols);
}

inline bool wants(const RunConfig& c, const std::string& fmt) {
    return c.formats.empty() || std::find(c.formats.begin(), c.formats.end(), fmt) != c.formats.end();
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return std::filesystem::path(c.out_dir) / name;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void maybe_export_lp(const RunConfig& c, const Scenario& s, const TariffAndCostParams& p) {
    if (c.export_lp.empty()) return;
    const auto parent = std::filesystem::path(c.export_lp).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(c.export_lp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + c.export_lp + "'");
    lp::write_lp_format(out, lp::build_lp(s, p).program);
}

// -----------------------------------------------------------------------------
// Subcommands
// -----------------------------------------------------------------------------

inline void cmd_size(const RunConfig& c, std::ostream& log) {
    const auto s = load_scenario(c);
    const auto p = params_of(c);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_scm(s, p);
    const double secs = seconds_since(t0);
    if (wants(c, "json")) {
        auto j = sizing_json(r.sizing);
        j["params"] = p;
        j["n_t"] = s.n_t();
        j["n_d"] = s.n_d();
        j["metadata"] = {{"generated_at", utc_now()}, {"scm_seconds", secs}};
        write_text(out_path(c, "sizing.json"), j.dump(2) + "\n");
    }
    if (wants(c, "csv")) {
        std::ostringstream csv;
        csv << "day,sold_kwh,charged_kwh\n";
        for (std::size_t d = 0; d < s.n_d(); ++d) {
            csv << d + 1 << ',' << num(r.sizing.per_day_sold[d]) << ',' << num(r.sizing.per_day_charged[d]) << '\n';
        }
        write_text(out_path(c, "daily_profile.csv"), csv.str());
    }
    maybe_export_lp(c, s, p);
    log << "v_pv = " << num(r.sizing.v_pv) << " kW, v_bat = " << num(r.sizing.v_bat)
        << " kWh, annual cost = " << num(r.sizing.annualized_total_cost) << '\n';
}

inline svg::Figure curves_figure(const ScreeningCurveSet& c, const SizingEstimate& est) {
    svg::Figure fig;
    svg::Panel costs{"Cost curves per slice", "PV capacity [kW]", "cost [currency/(kW yr)]", {}, {}};
    const auto& pal = svg::palette();
    costs.series.push_back({"grid", c.level_kw, c.c_grid_per_kw(), pal[0]});
    costs.series.push_back({"PV", c.level_kw, c.c_pv_per_kw(), pal[1]});
    costs.series.push_back({"PV + battery", c.level_kw, c.c_pvbat_per_kw(), pal[2]});
    if (est.first_crossing_slice) {
        const auto i = *est.first_crossing_slice;
        costs.markers.push_back({c.level_kw[i], c.c_grid_per_kw()[i], "crossing"});
    }
    svg::Panel bat{"Cumulative battery", "PV capacity [kW]", "battery [kWh]", {}, {}};
    bat.series.push_back({"cumulative battery", c.level_kw, c.cumulative_battery(), pal[3]});
    fig.panels = {costs, bat};
    return fig;
}

inline void cmd_curves(const RunConfig& c, std::ostream& log) {
    const auto s = load_scenario(c);
    const auto p = params_of(c);
    const auto r = run_scm(s, p);
    const auto& cv = r.curves;
    const auto g = cv.c_grid_per_kw(), pv = cv.c_pv_per_kw(), pb = cv.c_pvbat_per_kw();
    const auto cum = cv.cumulative_battery();
    if (wants(c, "csv")) {
        std::ostringstream csv;
        csv << "slice_level_kw,c_grid,c_pv,c_pvbat,q_bat,cumulative_battery,crossing\n";
        for (std::size_t i = 0; i < cv.size(); ++i) {
            const bool crossing = r.sizing.first_crossing_slice && *r.sizing.first_crossing_slice == i;
            csv << num(cv.level_kw[i]) << ',' << num(g[i]) << ',' << num(pv[i]) << ',' << num(pb[i]) << ','
                << num(cv.q_bat[i]) << ',' << num(cum[i]) << ',' << (crossing ? 1 : 0) << '\n';
        }
        write_text(out_path(c, "curves.csv"), csv.str());
    }
    if (wants(c, "json")) {
        auto j = curves_json(cv);
        j["sizing"] = sizing_json(r.sizing);
        j["metadata"] = {{"generated_at", utc_now()}};
        write_text(out_path(c, "curves.json"), j.dump(2) + "\n");
    }
    if (wants(c, "svg")) write_text(out_path(c, "curves.svg"), svg::render(curves_figure(cv, r.sizing)));
    log << cv.size() << " slices, J = " << cv.j_star << ", v_pv = " << num(r.sizing.v_pv) << " kW\n";
}

inline SweepSpec sweep_spec_of(const RunConfig& c, const TariffAndCostParams& base) {
    SweepSpec spec;
    if (!c.sweep_path.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(c.sweep_path));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(ErrorKind::ParseError, std::string("sweep spec: ") + e.what());
        }
        spec = sweep_spec_from_json(j, base);
    } else {
        if (c.sweep_param.empty()) {
            throw InputError(ErrorKind::InvalidParameter, "sensitivity needs --sweep <file> or --param with --values");
        }
        spec.parameter = parse_sweep_parameter(c.sweep_param);
        spec.values = c.sweep_values;
        spec.base = base;
    }
    if (c.with_lp) spec.with_lp = true;
    spec.lp_time_limit_s = c.lp_timeout_s;
    validate_sweep_spec(spec);
    return spec;
}

inline void cmd_sensitivity(const RunConfig& c, std::ostream& log) {
    const auto s = load_scenario(c);
    const auto spec = sweep_spec_of(c, params_of(c));
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_sweep(s, spec);
    const double secs = seconds_since(t0);

    if (wants(c, "json")) {
        nlohmann::json rows = nlohmann::json::array();
        nlohmann::json timings = nlohmann::json::array();
        for (const auto& row : res.rows) {
            auto j = to_json(row);
            if (j.contains("scm")) j["scm"].erase("seconds");
            if (j.contains("lp")) j["lp"].erase("seconds");
            rows.push_back(j);
            nlohmann::json t{{"scm_seconds", row.scm_seconds}};
            if (row.lp) t["lp_seconds"] = row.lp->seconds;
            timings.push_back(t);
        }
        nlohmann::json out{{"parameter", to_string(res.parameter)}, {"with_lp", spec.with_lp}, {"rows", rows}};
        out["metadata"] = {{"generated_at", utc_now()}, {"total_seconds", secs}, {"row_timings", timings}};
        write_text(out_path(c, "sweep.json"), out.dump(2) + "\n");
    }
    if (wants(c, "csv")) {
        std::ostringstream csv;
        write_sweep_csv(csv, res);
        write_text(out_path(c, "sweep.csv"), csv.str());
    }
    if (wants(c, "svg")) {
        std::vector<double> x, pv_scm, bat_scm, pv_lp, bat_lp, x_lp;
        for (const auto& row : res.rows) {
            if (row.error) continue;
            x.push_back(row.value);
            pv_scm.push_back(row.v_pv);
            bat_scm.push_back(row.v_bat);
            if (row.lp && row.lp->status == lp::SolveStatus::Optimal) {
                x_lp.push_back(row.value);
                pv_lp.push_back(row.lp->v_pv);
                bat_lp.push_back(row.lp->v_bat);
            }
        }
        const auto& pal = svg::palette();
        svg::Panel pv{"PV capacity", to_string(res.parameter), "v_pv [kW]", {}, {}};
        pv.series.push_back({"SCM", x, pv_scm, pal[1]});
        svg::Panel bat{"Battery capacity", to_string(res.parameter), "v_bat [kWh]", {}, {}};
        bat.series.push_back({"SCM", x, bat_scm, pal[1]});
        if (!x_lp.empty()) {
            pv.series.push_back({"LP", x_lp, pv_lp, pal[0], true});
            bat.series.push_back({"LP", x_lp, bat_lp, pal[0], true});
        }
        svg::Figure fig;
        fig.panels = {pv, bat};
        write_text(out_path(c, "sweep.svg"), svg::render(fig));
    }
    if (c.family) {
        const auto fam = curve_family(s, spec);
        std::ostringstream csv;
        csv << to_string(fam.parameter) << ",slice_level_kw,c_grid,c_pv,c_pvbat\n";
        svg::Panel panel{"Cost curves by " + std::string(to_string(fam.parameter)), "PV capacity [kW]",
                         "cost [currency/(kW yr)]", {}, {}};
        const auto& pal = svg::palette();
        for (std::size_t m = 0; m < fam.members.size(); ++m) {
            const auto& cv = fam.members[m].curves;
            const auto g = cv.c_grid_per_kw(), pv = cv.c_pv_per_kw(), pb = cv.c_pvbat_per_kw();
            for (std::size_t i = 0; i < cv.size(); ++i) {
                csv << num(fam.members[m].value) << ',' << num(cv.level_kw[i]) << ',' << num(g[i]) << ','
                    << num(pv[i]) << ',' << num(pb[i]) << '\n';
            }
            const std::string tag = num(fam.members[m].value);
            const auto& col = pal[m % pal.size()];
            if (m == 0) panel.series.push_back({"grid", cv.level_kw, g, "#000000"});
            panel.series.push_back({"PV @" + tag, cv.level_kw, pv, col});
            panel.series.push_back({"PV+bat @" + tag, cv.level_kw, pb, col, true});
        }
        write_text(out_path(c, "family_curves.csv"), csv.str());
        svg::Figure fig;
        fig.panels = {panel};
        write_text(out_path(c, "family_curves.svg"), svg::render(fig));
    }
    std::size_t errors = 0, divergent = 0;
    for (const auto& row : res.rows) {
        errors += row.error ? 1 : 0;
        divergent += row.bat_divergent ? 1 : 0;
    }
    log << res.rows.size() << " points, " << errors << " errors, " << divergent << " battery divergence flags\n";
}

inline void cmd_compare(const RunConfig& c, std::ostream& log) {
    const auto s = load_scenario(c);
    const auto p = params_of(c);
    maybe_export_lp(c, s, p);

    auto t0 = std::chrono::steady_clock::now();
    const auto r = run_scm(s, p);
    const double scm_secs = seconds_since(t0);

    lp::SimplexOptions opt;
    opt.time_limit_s = c.lp_timeout_s;
    const auto sol = lp::solve_sizing(s, p, opt);

    nlohmann::json j;
    j["n_t"] = s.n_t();
    j["n_d"] = s.n_d();
    j["params"] = p;
    j["scm"] = sizing_json(r.sizing);
    j["lp"] = {{"status", lp::to_string(sol.status)}, {"iterations", sol.iterations}};
    nlohmann::json meta{{"generated_at", utc_now()}, {"scm_seconds", scm_secs}, {"lp_seconds", sol.seconds}};

    // SCM sizing evaluated with optimal operation, so both costs are on the same footing.
    lp::SimplexOptions dopt = opt;
    t0 = std::chrono::steady_clock::now();
    const auto disp = lp::dispatch_lp(s, p, r.sizing.v_pv, r.sizing.v_bat, dopt);
    meta["dispatch_seconds"] = seconds_since(t0);
    j["scm"]["dispatch_status"] = lp::to_string(disp.status);
    if (disp.optimal()) j["scm"]["cost_via_dispatch_lp"] = disp.objective;

    if (sol.optimal()) {
        j["lp"]["v_pv_kw"] = sol.v_pv;
        j["lp"]["v_bat_kwh"] = sol.v_bat;
        j["lp"]["objective"] = sol.objective;
        const auto a = lp::audit(s, p, sol);
        j["lp"]["audit_ok"] = a.ok();
        j["difference"] = {{"v_pv_kw", r.sizing.v_pv - sol.v_pv}, {"v_bat_kwh", r.sizing.v_bat - sol.v_bat}};
        if (disp.optimal()) j["difference"]["cost"] = disp.objective - sol.objective;
    }
    meta["speed_ratio_lp_over_scm"] = scm_secs > 0.0 ? sol.seconds / scm_secs : 0.0;
    j["metadata"] = meta;
    write_text(out_path(c, "compare.json"), j.dump(2) + "\n");

    log << "SCM: v_pv = " << num(r.sizing.v_pv) << " kW, v_bat = " << num(r.sizing.v_bat) << " kWh ("
        << num(scm_secs) << " s)\n";
    log << "LP:  status " << lp::to_string(sol.status);
    if (sol.optimal()) log << ", v_pv = " << num(sol.v_pv) << " kW, v_bat = " << num(sol.v_bat) << " kWh";
    log << " (" << num(sol.seconds) << " s)\n";
}

inline classical::Technology parse_tech(const std::string& text) {
    // name:c_fix:c_var
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) {
        throw InputError(ErrorKind::InvalidParameter, "--tech expects name:c_fix:c_var, got '" + text + "'");
    }
    auto number = [&](const std::string& v) {
        const auto d = detail::parse_double(v);
        if (!d) throw InputError(ErrorKind::InvalidParameter, "--tech: '" + v + "' is not a number");
        return *d;
    };
    return {parts[0], number(parts[1]), number(parts[2])};
}

inline void cmd_classic(const RunConfig& c, std::ostream& log) {
    const auto s = load_scenario(c);
    std::vector<classical::Technology> techs;
    for (const auto& t : c.techs) techs.push_back(parse_tech(t));
    if (techs.empty()) techs = {{"base", 100.0, 1.0}, {"peaker", 10.0, 5.0}};
    const auto r = classical::classical_curves(techs, s.demand());

    if (wants(c, "csv")) {
        std::ostringstream lines;
        lines << "capacity_factor";
        for (const auto& t : techs) lines << ',' << t.name;
        lines << '\n';
        for (int i = 0; i <= 100; ++i) {
            const double f = i / 100.0;
            lines << num(f);
            for (const auto& t : techs) lines << ',' << num(classical::screening_cost(t, f));
            lines << '\n';
        }
        write_text(out_path(c, "classic_lines.csv"), lines.str());

        std::ostringstream ldc;
        ldc << "rank,capacity_factor,load_kw\n";
        const auto n = r.load_duration.size();
        for (std::size_t k = 0; k < n; ++k) {
            ldc << k + 1 << ',' << num(static_cast<double>(k + 1) / static_cast<double>(n)) << ','
                << num(r.load_duration[k] / s.step_hours()) << '\n';
        }
        write_text(out_path(c, "load_duration.csv"), ldc.str());

        std::ostringstream bands;
        bands << "technology,f_from,f_to,level_low_kw,level_high_kw,capacity_kw\n";
        for (const auto& b : r.bands) {
            bands << techs[b.technology].name << ',' << num(b.f_from) << ',' << num(b.f_to) << ','
                  << num(b.level_low / s.step_hours()) << ',' << num(b.level_high / s.step_hours()) << ','
                  << num(b.capacity() / s.step_hours()) << '\n';
        }
        write_text(out_path(c, "bands.csv"), bands.str());
    }
    if (wants(c, "svg")) {
        const auto& pal = svg::palette();
        svg::Panel lines{"Screening lines", "capacity factor", "cost [currency/(kW yr)]", {}, {}};
        std::vector<double> fs;
        for (int i = 0; i <= 100; ++i) fs.push_back(i / 100.0);
        for (std::size_t t = 0; t < techs.size(); ++t) {
            std::vector<double> ys;
            for (double f : fs) ys.push_back(classical::screening_cost(techs[t], f));
            lines.series.push_back({techs[t].name, fs, ys, pal[t % pal.size()]});
        }
        for (std::size_t e = 0; e + 1 < r.envelope.size(); ++e) {
            const double f = r.envelope[e].f_to;
            lines.markers.push_back({f, classical::screening_cost(techs[r.envelope[e].technology], f), ""});
        }
        svg::Panel ldc{"Load-duration curve", "capacity factor", "load [kW]", {}, {}};
        std::vector<double> xs, ys;
        const auto n = r.load_duration.size();
        for (std::size_t k = 0; k < n; ++k) {
            xs.push_back(static_cast<double>(k + 1) / static_cast<double>(n));
            ys.push_back(r.load_duration[k] / s.step_hours());
        }
        ldc.series.push_back({"load", xs, ys, pal[0]});
        svg::Figure fig;
        fig.panels = {lines, ldc};
        write_text(out_path(c, "classic.svg"), svg::render(fig));
    }
    for (const auto& b : r.bands) {
        log << techs[b.technology].name << ": f in [" << num(b.f_from) << ", " << num(b.f_to) << "], "
            << num(b.capacity() / s.step_hours()) << " kW\n";
    }
}

inline void cmd_serve(const RunConfig& c, std::ostream& log) {
    service::ScenarioStore store(c.store_capacity);
    httplib::Server server;
    service::ServerOptions opt;
    opt.store_capacity = c.store_capacity;
    opt.static_dir = c.ui_dir;
    service::install_routes(server, store, opt);
    log << "listening on http://" << c.host << ':' << c.port << '\n' << std::flush;
    if (!server.listen(c.host, c.port)) throw std::runtime_error("cannot listen on port " + std::to_string(c.port));
}

// -----------------------------------------------------------------------------
// Argument parsing and dispatch
// -----------------------------------------------------------------------------

inline void add_input_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--csv", c.csv_path, "Scenario CSV file");
    sub->add_option("--synthetic", c.synthetic_path, "Synthetic scenario spec (JSON)");
    sub->add_option("--demand-col", c.demand_col, "CSV demand column");
    sub->add_option("--irr-col", c.irr_col, "CSV irradiation column");
    sub->add_option("--day-col", c.day_col, "CSV day column (optional)");
    sub->add_option("--steps-per-day", c.steps_per_day, "Steps per day when the CSV has no day column");
}

inline void add_param_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--delta-p", c.delta_p, "Slice width [kW]");
    sub->add_option("--c-pv", c.c_pv, "PV fixed cost [currency/(kW yr)]");
    sub->add_option("--c-bat", c.c_bat, "Battery fixed cost [currency/(kWh yr)]");
    sub->add_option("--p-buy", c.p_buy, "Retail price [currency/kWh]");
    sub->add_option("--p-sell", c.p_sell, "Export price [currency/kWh]");
    sub->add_option("--e-chg", c.e_chg, "Charging efficiency");
    sub->add_option("--e-dis", c.e_dis, "Discharging efficiency");
    sub->add_option("--e-pv", c.e_pv, "PV performance ratio");
    sub->add_option("--g-stc", c.g_stc, "STC irradiance [kW/m^2]");
    sub->add_option("--m-pv", c.m_pv, "PV capacity cap [kW]");
}

inline void add_output_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--out", c.out_dir, "Output directory");
    sub->add_option("--format", c.formats, "Output formats (json, csv, svg)")
        ->delimiter(',')
        ->check(CLI::IsMember({"json", "csv", "svg"}));
}

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig c;
    CLI::App app{"Screening-curve sizing of household PV and battery"};
    app.require_subcommand(1);

    auto* size = app.add_subcommand("size", "Estimate PV and battery sizes");
    auto* curves = app.add_subcommand("curves", "Write the per-slice cost curves");
    auto* sens = app.add_subcommand("sensitivity", "Sweep one price or cost parameter");
    auto* compare = app.add_subcommand("compare", "Compare the estimate with the exact LP");
    auto* classic = app.add_subcommand("classic", "Classical screening curves for dispatchable plants");
    auto* serve = app.add_subcommand("serve", "Start the HTTP service");

    for (auto* sub : {size, curves, sens, compare, classic}) {
        add_input_options(sub, c);
        add_output_options(sub, c);
    }
    for (auto* sub : {size, curves, sens, compare}) add_param_options(sub, c);
    for (auto* sub : {size, compare}) sub->add_option("--export-lp", c.export_lp, "Write the sizing LP (LP format)");
    for (auto* sub : {sens, compare}) {
        sub->add_option("--lp-timeout-s", c.lp_timeout_s, "LP time budget per solve [s]");
    }
    sens->add_flag("--with-lp", c.with_lp, "Also solve the LP at every point");
    sens->add_option("--sweep", c.sweep_path, "Sweep spec (JSON)");
    sens->add_option("--param", c.sweep_param, "Swept parameter (c_pv_fixed, c_bat_fixed, p_buy, p_sell)");
    sens->add_option("--values", c.sweep_values, "Ascending values")->delimiter(',');
    sens->add_flag("--family", c.family, "Also write cost-curve families (at most 5 values)");
    classic->add_option("--tech", c.techs, "Technology as name:c_fix:c_var (repeatable)");
    serve->add_option("--port", c.port, "TCP port");
    serve->add_option("--host", c.host, "Bind address");
    serve->add_option("--store-capacity", c.store_capacity, "Maximum number of stored scenarios");
    serve->add_option("--ui-dir", c.ui_dir, "Directory of static UI assets served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << nlohmann::json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }

    try {
        if (size->parsed()) cmd_size(c, out);
        else if (curves->parsed()) cmd_curves(c, out);
        else if (sens->parsed()) cmd_sensitivity(c, out);
        else if (compare->parsed()) cmd_compare(c, out);
        else if (classic->parsed()) cmd_classic(c, out);
        else if (serve->parsed()) cmd_serve(c, out);
        return 0;
    } catch (const InputError& e) {
        err << error_json(e).dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << nlohmann::json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 3;
    }
}

}  // namespace pvscm::cli
