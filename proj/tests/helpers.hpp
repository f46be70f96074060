#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "pvscm/domain.hpp"

namespace testutil {

inline pvscm::Scenario make_scenario(std::vector<double> demand, std::vector<double> irradiation,
                                     int steps_per_day = 24) {
    pvscm::ScenarioCandidate c;
    c.demand = std::move(demand);
    c.irradiation = std::move(irradiation);
    c.steps_per_day = steps_per_day;
    return pvscm::validate_scenario(std::move(c));
}

/// Small random scenario: `days` days of `spd` steps, sun in the middle half.
inline pvscm::Scenario random_scenario(std::mt19937_64& rng, int days, int spd) {
    std::uniform_real_distribution<double> dem(0.0, 2.0), irr(0.0, 1.0);
    std::vector<double> d, s;
    for (int day = 0; day < days; ++day) {
        for (int k = 0; k < spd; ++k) {
            d.push_back(dem(rng));
            const bool sun = k >= spd / 4 && k < spd - spd / 4;
            s.push_back(sun ? irr(rng) : 0.0);
        }
    }
    return make_scenario(std::move(d), std::move(s), spd);
}

/// Annual cost of the best operation with fixed capacities, by dynamic
/// programming over `levels` evenly spaced state-of-charge values with a
/// cyclic boundary. Every grid path is feasible for the LP, so this is an
/// upper bound on the LP optimum that tightens as `levels` grows.
inline double dispatch_cost_dp(const pvscm::Scenario& s, const pvscm::TariffAndCostParams& p, double v_pv,
                               double v_bat, int levels = 41) {
    const std::size_t n = s.n_t();
    const double f = s.f_anu();
    auto step_cost = [&](std::size_t k, double from, double to) {
        const double delta = to - from;
        const double pv = s.irradiation()[k] * p.e_pv / p.g_stc * v_pv;
        const double bat = delta > 0 ? delta / p.e_chg : delta * p.e_dis;  // grid-side battery flow
        const double net = s.demand()[k] - pv + bat;
        return net > 0 ? f * p.p_buy * net : f * p.p_sell * net;
    };
    const int L = v_bat > 0 ? levels : 1;
    auto level = [&](int i) { return L == 1 ? 0.0 : v_bat * i / (L - 1); };
    const double inf = std::numeric_limits<double>::infinity();
    double best = inf;
    std::vector<double> cur(L), next(L);
    for (int start = 0; start < L; ++start) {
        std::fill(cur.begin(), cur.end(), inf);
        cur[start] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::fill(next.begin(), next.end(), inf);
            for (int a = 0; a < L; ++a) {
                if (cur[a] == inf) continue;
                for (int b = 0; b < L; ++b) {
                    next[b] = std::min(next[b], cur[a] + step_cost(k, level(a), level(b)));
                }
            }
            std::swap(cur, next);
        }
        best = std::min(best, cur[start]);
    }
    return best + p.c_pv_fixed * v_pv + p.c_bat_fixed * v_bat;
}

}  // namespace testutil
