#pragma once

/**
 * @file oracle.hpp
 * @brief Solving the sizing LP, the fixed-capacity dispatch LP, and an audit
 *        that re-checks a solution against the model equations directly.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pvscm/domain.hpp"
#include "pvscm/lp/model.hpp"
#include "pvscm/lp/simplex.hpp"

namespace pvscm::lp {

struct LpSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    double v_pv = 0.0;   ///< [kW]
    double v_bat = 0.0;  ///< [kWh]
    std::vector<double> u_buy, u_sell, u_bin, u_bout, soc;  ///< per step [kWh]
    double objective = 0.0;  ///< [currency/yr]
    std::size_t iterations = 0;
    double seconds = 0.0;
    std::string message;

    bool optimal() const noexcept { return status == SolveStatus::Optimal; }
};

inline LpSolution solve(const LpModel& model, const SimplexOptions& options = {}) {
    const SimplexResult r = solve_simplex(model.program, options);
    LpSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.seconds = r.seconds;
    sol.message = r.message;
    if (r.status != SolveStatus::Optimal) return sol;
    const std::size_t n = model.n_t;
    sol.v_pv = r.x[LpModel::v_pv];
    sol.v_bat = r.x[LpModel::v_bat];
    auto series = [&](std::size_t first) {
        return std::vector<double>(r.x.begin() + static_cast<std::ptrdiff_t>(first),
                                   r.x.begin() + static_cast<std::ptrdiff_t>(first + n));
    };
    sol.u_buy = series(model.u_buy(0));
    sol.u_sell = series(model.u_sell(0));
    sol.u_bin = series(model.u_bin(0));
    sol.u_bout = series(model.u_bout(0));
    sol.soc = series(model.x_soc(0));
    sol.objective = r.objective;
    return sol;
}

inline LpSolution solve_sizing(const Scenario& s, const TariffAndCostParams& p, const SimplexOptions& options = {}) {
    return solve(build_lp(s, p), options);
}

/// Optimal operation with both capacities fixed. The objective still includes
/// the capacity costs, so it is directly comparable with the sizing optimum.
inline LpSolution dispatch_lp(const Scenario& s, const TariffAndCostParams& p, double v_pv, double v_bat,
                              const SimplexOptions& options = {}) {
    if (!(v_pv >= 0.0) || !(v_bat >= 0.0)) {
        throw InputError(ErrorKind::InvalidParameter, "fixed capacities must be >= 0");
    }
    LpBuildOptions b;
    b.fix_v_pv = v_pv;
    b.fix_v_bat = v_bat;
    return solve(build_lp(s, p, b), options);
}

/// Objective recomputed from the solution's capacities and trade series.
inline double recompute_objective(const Scenario& s, const TariffAndCostParams& p, const LpSolution& sol) {
    double trade = 0.0;
    for (std::size_t k = 0; k < s.n_t(); ++k) trade += p.p_buy * sol.u_buy[k] - p.p_sell * sol.u_sell[k];
    return s.f_anu() * trade + p.c_pv_fixed * sol.v_pv + p.c_bat_fixed * sol.v_bat;
}

struct AuditReport {
    double max_soc_residual = 0.0;      ///< state equation incl. cyclic boundary, normalized
    double max_balance_residual = 0.0;  ///< energy balance, normalized
    double max_cap_violation = 0.0;     ///< x_soc <= v_bat
    double pv_cap_violation = 0.0;      ///< v_pv <= m_pv_max
    double min_value = 0.0;             ///< most negative variable
    double objective_rel_error = 0.0;
    double max_buy_sell_overlap = 0.0;  ///< max_k min(u_buy, u_sell)
    bool feasible = false;
    bool complementary = false;

    bool ok() const noexcept { return feasible && complementary; }
};

/// Re-checks an optimal solution against the model equations, independently of
/// the solver's internal rows. Residuals are divided by each row's largest
/// coefficient.
inline AuditReport audit(const Scenario& s, const TariffAndCostParams& p, const LpSolution& sol,
                         double tol = 1e-7) {
    AuditReport a;
    const std::size_t n = s.n_t();
    if (!sol.optimal() || sol.soc.size() != n) return a;
    const double soc_scale = std::max({1.0, p.e_chg, 1.0 / p.e_dis});
    for (std::size_t k = 0; k < n; ++k) {
        const double next = sol.soc[(k + 1) % n];
        const double res = next - sol.soc[k] - p.e_chg * sol.u_bin[k] + sol.u_bout[k] / p.e_dis;
        a.max_soc_residual = std::max(a.max_soc_residual, std::abs(res) / soc_scale);

        const double pv = s.irradiation()[k] * p.e_pv / p.g_stc;
        const double supply = sol.u_buy[k] - sol.u_sell[k] - sol.u_bin[k] + sol.u_bout[k] + pv * sol.v_pv;
        a.max_balance_residual =
            std::max(a.max_balance_residual, std::abs(supply - s.demand()[k]) / std::max(1.0, pv));

        a.max_cap_violation = std::max(a.max_cap_violation, sol.soc[k] - sol.v_bat);
        a.min_value = std::min({a.min_value, sol.u_buy[k], sol.u_sell[k], sol.u_bin[k], sol.u_bout[k], sol.soc[k]});
        a.max_buy_sell_overlap = std::max(a.max_buy_sell_overlap, std::min(sol.u_buy[k], sol.u_sell[k]));
    }
    a.min_value = std::min({a.min_value, sol.v_pv, sol.v_bat});
    a.pv_cap_violation = std::max(0.0, sol.v_pv - p.m_pv_max);
    const double recomputed = recompute_objective(s, p, sol);
    a.objective_rel_error = std::abs(recomputed - sol.objective) / std::max(1.0, std::abs(recomputed));
    a.feasible = a.max_soc_residual <= tol && a.max_balance_residual <= tol && a.max_cap_violation <= tol &&
                 a.pv_cap_violation <= tol && a.min_value >= -tol && a.objective_rel_error <= tol;
    a.complementary = a.max_buy_sell_overlap <= tol;
    return a;
}

}  // namespace pvscm::lp
