#pragma once

/**
 * @file model.hpp
 * @brief The exact PV + battery sizing LP over a chronological scenario.
 *
 * Variables (all >= 0): v_pv, v_bat, then for every step k the series
 * u_buy, u_sell, u_bin, u_bout, x_soc. Rows:
 *   soc_k:  x_soc[k+1] - x_soc[k] - e_chg u_bin[k] + u_bout[k] / e_dis = 0,
 *           with x_soc[n_t] aliased to x_soc[0] (cyclic state of charge)
 *   bal_k:  u_buy - u_sell - u_bin + u_bout + S_k e_pv / g_stc v_pv = D_k
 *   cap_k:  x_soc[k] - v_bat <= 0
 *   pvcap:  v_pv <= m_pv_max
 * Objective: c_pv v_pv + c_bat v_bat + f_anu sum_k (p_buy u_buy - p_sell u_sell).
 */

#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "pvscm/domain.hpp"
#include "pvscm/lp/simplex.hpp"

namespace pvscm::lp {

struct LpBuildOptions {
    bool pv_cap = true;             ///< include v_pv <= m_pv_max
    std::optional<double> fix_v_pv;   ///< add v_pv = value
    std::optional<double> fix_v_bat;  ///< add v_bat = value
};

struct LpModel {
    LinearProgram program;
    std::size_t n_t = 0;
    std::size_t num_equalities = 0;
    std::size_t num_inequalities = 0;

    static constexpr std::size_t v_pv = 0;
    static constexpr std::size_t v_bat = 1;
    std::size_t u_buy(std::size_t k) const { return 2 + k; }
    std::size_t u_sell(std::size_t k) const { return 2 + n_t + k; }
    std::size_t u_bin(std::size_t k) const { return 2 + 2 * n_t + k; }
    std::size_t u_bout(std::size_t k) const { return 2 + 3 * n_t + k; }
    std::size_t x_soc(std::size_t k) const { return 2 + 4 * n_t + k; }
    std::size_t num_vars() const { return program.num_vars(); }
};

inline LpModel build_lp(const Scenario& s, const TariffAndCostParams& p, const LpBuildOptions& opt = {}) {
    validate_params(p);
    LpModel m;
    const std::size_t n = s.n_t();
    m.n_t = n;
    auto& lp = m.program;
    const std::size_t nv = 2 + 5 * n;
    lp.cost.assign(nv, 0.0);
    lp.var_names.resize(nv);
    lp.var_names[LpModel::v_pv] = "v_pv";
    lp.var_names[LpModel::v_bat] = "v_bat";
    const double f = s.f_anu();
    for (std::size_t k = 0; k < n; ++k) {
        const std::string idx = std::to_string(k + 1);
        lp.var_names[m.u_buy(k)] = "u_buy_" + idx;
        lp.var_names[m.u_sell(k)] = "u_sell_" + idx;
        lp.var_names[m.u_bin(k)] = "u_bin_" + idx;
        lp.var_names[m.u_bout(k)] = "u_bout_" + idx;
        lp.var_names[m.x_soc(k)] = "x_soc_" + idx;
        lp.cost[m.u_buy(k)] = f * p.p_buy;
        lp.cost[m.u_sell(k)] = -f * p.p_sell;
    }
    lp.cost[LpModel::v_pv] = p.c_pv_fixed;
    lp.cost[LpModel::v_bat] = p.c_bat_fixed;

    lp.rows.reserve(3 * n + 3);
    for (std::size_t k = 0; k < n; ++k) {
        Row r;
        r.name = "soc_" + std::to_string(k + 1);
        r.sense = RowSense::Equal;
        r.terms = {{m.x_soc((k + 1) % n), 1.0},
                   {m.x_soc(k), -1.0},
                   {m.u_bin(k), -p.e_chg},
                   {m.u_bout(k), 1.0 / p.e_dis}};
        lp.rows.push_back(std::move(r));
    }
    for (std::size_t k = 0; k < n; ++k) {
        Row r;
        r.name = "bal_" + std::to_string(k + 1);
        r.sense = RowSense::Equal;
        r.rhs = s.demand()[k];
        r.terms = {{m.u_buy(k), 1.0}, {m.u_sell(k), -1.0}, {m.u_bin(k), -1.0}, {m.u_bout(k), 1.0}};
        const double pv = s.irradiation()[k] * p.e_pv / p.g_stc;
        if (pv != 0.0) r.terms.push_back({LpModel::v_pv, pv});
        lp.rows.push_back(std::move(r));
    }
    for (std::size_t k = 0; k < n; ++k) {
        Row r;
        r.name = "cap_" + std::to_string(k + 1);
        r.sense = RowSense::LessEqual;
        r.terms = {{m.x_soc(k), 1.0}, {LpModel::v_bat, -1.0}};
        lp.rows.push_back(std::move(r));
    }
    m.num_equalities = 2 * n;
    m.num_inequalities = n;
    if (opt.pv_cap) {
        lp.rows.push_back({"pvcap", {{LpModel::v_pv, 1.0}}, RowSense::LessEqual, p.m_pv_max});
        ++m.num_inequalities;
    }
    if (opt.fix_v_pv) {
        lp.rows.push_back({"fix_v_pv", {{LpModel::v_pv, 1.0}}, RowSense::Equal, *opt.fix_v_pv});
        ++m.num_equalities;
    }
    if (opt.fix_v_bat) {
        lp.rows.push_back({"fix_v_bat", {{LpModel::v_bat, 1.0}}, RowSense::Equal, *opt.fix_v_bat});
        ++m.num_equalities;
    }
    return m;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_terms(std::ostream& out, const LinearProgram& lp, const std::vector<Term>& terms) {
    std::size_t on_line = 0;
    for (const auto& t : terms) {
        if (on_line == 6) {
            out << "\n   ";
            on_line = 0;
        }
        out << (t.coef < 0.0 ? " - " : " + ") << fmt_num(std::abs(t.coef)) << ' ' << lp.var_names[t.var];
        ++on_line;
    }
    if (terms.empty()) out << " 0 " << lp.var_names.front();
}

}  // namespace detail

/// Writes the program in CPLEX LP text format (Minimize / Subject To / Bounds / End).
inline void write_lp_format(std::ostream& out, const LinearProgram& lp) {
    out << "\\ PV + battery sizing LP: " << lp.num_vars() << " variables, " << lp.rows.size() << " rows\n";
    if (lp.objective_offset != 0.0) out << "\\ objective offset " << detail::fmt_num(lp.objective_offset) << '\n';
    out << "Minimize\n obj:";
    std::vector<Term> obj;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
        if (lp.cost[j] != 0.0) obj.push_back({j, lp.cost[j]});
    }
    detail::write_terms(out, lp, obj);
    out << "\nSubject To\n";
    for (const auto& row : lp.rows) {
        out << ' ' << row.name << ':';
        detail::write_terms(out, lp, row.terms);
        switch (row.sense) {
            case RowSense::LessEqual: out << " <= "; break;
            case RowSense::Equal: out << " = "; break;
            case RowSense::GreaterEqual: out << " >= "; break;
        }
        out << detail::fmt_num(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& name : lp.var_names) out << ' ' << name << " >= 0\n";
    out << "End\n";
}

}  // namespace pvscm::lp
