#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "pvscm/ingest.hpp"
#include "pvscm/scm.hpp"

using namespace pvscm;
using testutil::make_scenario;
using testutil::random_scenario;

namespace {

// Unit PV yield: g_k = S_k when e_pv = g_stc = delta_p = 1.
TariffAndCostParams unit_params(double slices) {
    TariffAndCostParams p;
    p.e_pv = 1.0;
    p.g_stc = 1.0;
    p.delta_p = 1.0;
    p.m_pv_max = slices;
    return p;
}

// Slice cost written out with an explicit chronological charge profile.
double cost_pv_battery_explicit(std::size_t i, double q_bat, const SliceDecomposition& d, const Scenario& s,
                                const TariffAndCostParams& p) {
    const auto q_chg = slice_charge_steps(i, q_bat, d, s, p);
    double sold = 0.0, charged = 0.0;
    for (std::size_t k = 0; k < d.n_t; ++k) {
        sold += d.sur(i, k) - q_chg[k];
        charged += q_chg[k];
    }
    return p.c_pv_fixed * d.width_kw[i] + p.c_bat_fixed * q_bat - s.f_anu() * p.p_sell * sold -
           s.f_anu() * p.p_buy * p.e_dis * p.e_chg * charged;
}

}  // namespace

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

TEST(Decompose, SingleStepDemandOneAndAHalfBands) {
    const auto s = make_scenario({1.5}, {1.0}, 1);
    const auto d = decompose(s, unit_params(3));
    ASSERT_EQ(d.n_slices, 3u);
    EXPECT_EQ(d.unit_gen[0], 1.0);
    EXPECT_EQ(d.load(0, 0), 1.0);
    EXPECT_EQ(d.load(1, 0), 0.5);
    EXPECT_EQ(d.load(2, 0), 0.0);
    EXPECT_EQ(d.sur(0, 0), 0.0);
    EXPECT_EQ(d.sur(1, 0), 0.5);
    EXPECT_EQ(d.sur(2, 0), 1.0);
    EXPECT_EQ(d.load(0, 0) + d.load(1, 0) + d.load(2, 0), std::min(1.5, 3.0 * 1.0));
}

TEST(Decompose, SameExampleWithScaledYield) {
    // g = S * e_pv * delta_p / g_stc = 0.8 * 0.78 * 0.01
    TariffAndCostParams p;
    p.m_pv_max = 0.03;
    const auto s = make_scenario({1.5 * 0.8 * 0.78 * 0.01}, {0.8}, 1);
    const auto d = decompose(s, p);
    const double g = d.unit_gen[0];
    EXPECT_DOUBLE_EQ(g, 0.8 * 0.78 * 0.01);
    EXPECT_DOUBLE_EQ(d.load(0, 0), g);
    EXPECT_NEAR(d.load(1, 0), 0.5 * g, 1e-15);
    EXPECT_EQ(d.load(2, 0), 0.0);
    EXPECT_NEAR(d.sur(1, 0), 0.5 * g, 1e-15);
    EXPECT_EQ(d.sur(2, 0), g);
}

TEST(Decompose, NoDemandIsAllSurplus) {
    const auto s = make_scenario({0, 0, 0, 0}, {0.0, 0.3, 0.6, 0.1}, 4);
    const auto d = decompose(s, TariffAndCostParams{});
    for (std::size_t i = 0; i < d.n_slices; ++i) {
        for (std::size_t k = 0; k < d.n_t; ++k) {
            EXPECT_EQ(d.load(i, k), 0.0);
            EXPECT_EQ(d.sur(i, k), d.unit_gen[k]);
        }
    }
}

TEST(Decompose, NoSunGivesEmptyBands) {
    const auto s = make_scenario({1, 2, 3}, {0, 0, 0}, 3);
    const auto d = decompose(s, TariffAndCostParams{});
    EXPECT_TRUE(std::all_of(d.q_load.begin(), d.q_load.end(), [](double v) { return v == 0.0; }));
    EXPECT_TRUE(std::all_of(d.q_sur.begin(), d.q_sur.end(), [](double v) { return v == 0.0; }));
}

TEST(Decompose, SliceCountAndPartialLastSlice) {
    TariffAndCostParams p;
    EXPECT_EQ(slice_count(p), 1000u);  // 10 / 0.01 despite 0.01 being inexact
    p.m_pv_max = 0.025;
    const auto s = make_scenario({0.01}, {1.0}, 1);
    const auto d = decompose(s, p);
    ASSERT_EQ(d.n_slices, 3u);
    EXPECT_EQ(d.width_kw[0], 0.01);
    EXPECT_EQ(d.width_kw[1], 0.01);
    EXPECT_NEAR(d.width_kw[2], 0.005, 1e-15);
    EXPECT_NEAR(d.level_kw(2), 0.025, 1e-15);
    // The last band is half as tall as a full one.
    EXPECT_NEAR(d.load(2, 0) + d.sur(2, 0), 0.5 * d.unit_gen[0], 1e-15);
}

TEST(Decompose, InvariantsOnRandomScenarios) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = random_scenario(rng, 3, 8);
        TariffAndCostParams p;
        p.delta_p = 0.05;
        p.m_pv_max = 4.0;
        const auto d = decompose(s, p);
        for (std::size_t k = 0; k < d.n_t; ++k) {
            double load = 0.0, sur = 0.0;
            for (std::size_t i = 0; i < d.n_slices; ++i) {
                EXPECT_GE(d.load(i, k), 0.0);
                EXPECT_GE(d.sur(i, k), 0.0);
                EXPECT_NEAR(d.load(i, k) + d.sur(i, k), d.unit_gen[k], 1e-15);
                if (i > 0) EXPECT_GE(d.sur(i, k), d.sur(i - 1, k));
                load += d.load(i, k);
                sur += d.sur(i, k);
            }
            const double n = static_cast<double>(d.n_slices);
            EXPECT_NEAR(load, std::min(s.demand()[k], n * d.unit_gen[k]), 1e-12);
            EXPECT_NEAR(load + sur, n * d.unit_gen[k], 1e-12);
        }
        for (std::size_t i = 0; i < d.n_slices; ++i) {
            const auto daily = daily_surplus(d, s, i);
            const auto row = d.sur_row(i);
            EXPECT_NEAR(std::accumulate(daily.begin(), daily.end(), 0.0), std::accumulate(row.begin(), row.end(), 0.0),
                        1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// Cost curves
// ---------------------------------------------------------------------------

namespace {

// 365 one-step days (f_anu = 1); only day 1 has demand and sun.
Scenario year_of_single_steps(double demand, double irradiation) {
    std::vector<double> d(365, 0.0), s(365, 0.0);
    d[0] = demand;
    s[0] = irradiation;
    return make_scenario(d, s, 1);
}

}  // namespace

TEST(CostGrid, DirectSum) {
    const auto s = year_of_single_steps(100.0, 100.0);
    ASSERT_EQ(s.f_anu(), 1.0);
    auto p = unit_params(1);
    const auto d = decompose(s, p);
    EXPECT_EQ(cost_grid(0, d, s, p), 2600.0);
    p.p_buy = 52.0;
    EXPECT_EQ(cost_grid(0, d, s, p), 5200.0);
}

TEST(CostGrid, ZeroCoveredLoad) {
    const auto s = year_of_single_steps(0.0, 100.0);
    const auto p = unit_params(1);
    EXPECT_EQ(cost_grid(0, decompose(s, p), s, p), 0.0);
}

TEST(CostPv, DirectEvaluation) {
    // delta_p = 0.01, e_pv = 1: surplus = 1000 * 0.01 = 10 kWh
    const auto s = year_of_single_steps(0.0, 1000.0);
    TariffAndCostParams p;
    p.e_pv = 1.0;
    p.m_pv_max = 0.01;
    const auto d = decompose(s, p);
    EXPECT_NEAR(d.sur_total[0], 10.0, 1e-12);
    EXPECT_NEAR(cost_pv(0, d, s, p), 120.0 - 60.0, 1e-9);
}

TEST(CostPv, ZeroSurplusStartsAtFixedCost) {
    const auto s = year_of_single_steps(1e6, 1.0);  // demand swamps every band
    TariffAndCostParams p;
    const auto d = decompose(s, p);
    EXPECT_EQ(cost_pv(0, d, s, p), p.c_pv_fixed * p.delta_p);
    const auto c = build_curves(d, s, p);
    EXPECT_DOUBLE_EQ(c.c_pv_per_kw()[0], 12000.0);
    EXPECT_DOUBLE_EQ(c.c_pvbat_per_kw()[0], 12000.0);
}

// ---------------------------------------------------------------------------
// J
// ---------------------------------------------------------------------------

TEST(ComputeJ, FullYearBaseCase) {
    // 26 * 0.81 - 6 = 15.06; 4400 * 0.9 / 15.06 = 262.948...; floor(366 - 262.948) = 103
    EXPECT_EQ(compute_j(TariffAndCostParams{}, 365, 1.0), 103);
}

TEST(ComputeJ, ClampsToZeroAndNd) {
    TariffAndCostParams p;
    p.c_bat_fixed = 1e9;
    EXPECT_EQ(compute_j(p, 365, 1.0), 0);
    p.c_bat_fixed = 0.0;
    EXPECT_EQ(compute_j(p, 89, 365.0 / 89.0), 89);
    EXPECT_EQ(compute_j(p, 1, 365.0), 1);
}

TEST(ComputeJ, NonViableTariff) {
    TariffAndCostParams p;
    p.p_buy = 7.0;
    p.p_sell = 6.0;
    try {
        compute_j(p, 30, 365.0 / 30.0);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonViableTariff);
    }
    EXPECT_EQ(j_star(p, 30, 365.0 / 30.0), 0);
}

// ---------------------------------------------------------------------------
// Battery sizing
// ---------------------------------------------------------------------------

TEST(Battery, HandExample) {
    const std::vector<double> sur{4.0, 1.0, 2.0};
    const auto b = battery_for_slice(sur, 0.9, 2);
    EXPECT_DOUBLE_EQ(b.q_bat, 1.8);
    EXPECT_DOUBLE_EQ(b.q_chg_total, 5.0);
    EXPECT_EQ(b.day_order, (std::vector<std::size_t>{1, 2, 0}));
}

TEST(Battery, ZeroJ) {
    const std::vector<double> sur{4.0, 1.0, 2.0};
    const auto b = battery_for_slice(sur, 0.9, 0);
    EXPECT_EQ(b.q_bat, 0.0);
    EXPECT_EQ(b.q_chg_total, 0.0);
    EXPECT_EQ(b.day_order.size(), 3u);
}

TEST(Battery, IdenticalDays) {
    const std::vector<double> sur(7, 2.5);
    const auto b = battery_for_slice(sur, 0.9, 7);
    EXPECT_DOUBLE_EQ(b.q_bat, 0.9 * 2.5);
    EXPECT_DOUBLE_EQ(b.q_chg_total, 7 * 2.5);
    EXPECT_EQ(b.day_order, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}));
}

TEST(Battery, TiesKeepDayOrder) {
    const std::vector<double> sur{3.0, 1.0, 3.0, 1.0};
    EXPECT_EQ(order_days(sur), (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(MarginalBenefits, ZeroIncrementGivesZero) {
    const std::vector<double> sur{2.0, 2.0, 5.0};
    const auto b = marginal_benefits(sur, TariffAndCostParams{}, 365.0 / 3.0);
    EXPECT_EQ(b[1], 0.0);
    EXPECT_NE(b[0], 0.0);
}

TEST(MarginalBenefits, PerUnitBenefitDecreases) {
    const std::vector<double> sur{1.0, 2.0, 3.5, 4.0, 7.0};
    TariffAndCostParams p;
    const double f = 365.0 / 5.0;
    const auto b = marginal_benefits(sur, p, f);
    double prev_q = 0.0;
    double prev_unit = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sur.size(); ++j) {
        const double dq = p.e_chg * sur[j] - prev_q;
        const double unit = b[j] / dq;
        EXPECT_LT(unit, prev_unit);
        prev_unit = unit;
        prev_q = p.e_chg * sur[j];
    }
}

TEST(MarginalBenefits, ScanMatchesClosedFormJ) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 300; ++draw) {
        TariffAndCostParams p;
        p.c_bat_fixed = 10000.0 * u(rng);
        p.e_chg = 0.5 + 0.5 * u(rng);
        p.e_dis = 0.5 + 0.5 * u(rng);
        p.p_sell = 20.0 * u(rng);
        p.p_buy = p.p_sell / (p.e_chg * p.e_dis) + 0.01 + 40.0 * u(rng);
        const std::size_t nd = 1 + static_cast<std::size_t>(60 * u(rng));
        std::vector<double> sur(nd);
        double acc = 0.0;
        for (auto& v : sur) v = (acc += 0.01 + u(rng));  // strictly increasing
        std::shuffle(sur.begin(), sur.end(), rng);
        const double f = 365.0 / static_cast<double>(nd);
        const auto b = marginal_benefits(sur, p, f);
        int scan = 0;
        for (std::size_t j = 0; j < nd; ++j) {
            if (b[j] >= 0.0) scan = static_cast<int>(j + 1);
        }
        EXPECT_EQ(compute_j(p, nd, f), scan) << "draw " << draw;
    }
}

TEST(CostPvBattery, ZeroJEqualsPvOnly) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    const auto d = decompose(s, p);
    for (std::size_t i : {0u, 100u, 400u, 999u}) EXPECT_EQ(cost_pv_battery(i, d, s, p, 0), cost_pv(i, d, s, p));
}

TEST(CostPvBattery, ClosedFormEqualsExplicitProfile) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> days(1, 12);
    for (int rep = 0; rep < 25; ++rep) {
        const auto s = random_scenario(rng, days(rng), 8);
        TariffAndCostParams p;
        p.delta_p = 0.1;
        p.m_pv_max = 5.0;
        p.c_bat_fixed = 400.0;
        const auto d = decompose(s, p);
        const int J = j_star(s, p);
        for (std::size_t i = 0; i < d.n_slices; ++i) {
            const auto bat = battery_for_slice(i, d, s, p, J);
            const double closed = cost_pv_battery(i, d, s, p, J);
            const double explicit_form = cost_pv_battery_explicit(i, bat.q_bat, d, s, p);
            EXPECT_NEAR(closed, explicit_form, 1e-9 * std::max(1.0, std::abs(explicit_form)));
        }
    }
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

TEST(Curves, EmptyScenario) {
    const auto s = make_scenario(std::vector<double>(24, 0.0), std::vector<double>(24, 0.0));
    TariffAndCostParams p;
    const auto c = build_curves(s, p);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c.c_grid[i], 0.0);
        EXPECT_EQ(c.c_pv[i], p.c_pv_fixed * p.delta_p);
        EXPECT_EQ(c.c_pvbat[i], p.c_pv_fixed * p.delta_p);
    }
}

TEST(Curves, GridCostNonIncreasingAndBatteryDominates) {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = random_scenario(rng, 5, 24);
        TariffAndCostParams p;
        p.c_bat_fixed = 1000.0;
        const auto c = build_curves(s, p);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i > 0) EXPECT_LE(c.c_grid[i], c.c_grid[i - 1]);
            EXPECT_LE(c.c_pvbat[i], c.c_pv[i] + 1e-9 * std::abs(c.c_pv[i]));
            EXPECT_GE(c.q_bat[i], 0.0);
        }
    }
}

TEST(Curves, NonViableTariffDisablesBattery) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    p.p_buy = 7.0;
    const auto c = build_curves(s, p);
    EXPECT_EQ(c.j_star, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c.q_bat[i], 0.0);
        EXPECT_EQ(c.c_pvbat[i], c.c_pv[i]);
    }
}

TEST(Curves, BaseCaseShapeOnEightyNineDays) {
    const auto s = generate_synthetic(three_season_spec());
    const TariffAndCostParams p;
    const auto r = run_scm(s, p);
    const auto& c = r.curves;
    // Low bands: PV beats the grid; PV + battery never above PV; grid crosses further up.
    EXPECT_LT(std::min(c.c_pv[0], c.c_pvbat[0]), c.c_grid[0]);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE(c.c_pvbat[i], c.c_pv[i]);
    ASSERT_TRUE(r.sizing.first_crossing_kw.has_value());
    EXPECT_GT(*r.sizing.first_crossing_kw, 1.0);
    EXPECT_LT(*r.sizing.first_crossing_kw, p.m_pv_max);
    EXPECT_GT(r.sizing.v_pv, 1.0);
    EXPECT_LT(r.sizing.v_pv, 10.0);
    const auto cum = c.cumulative_battery();
    for (std::size_t i = 1; i < cum.size(); ++i) EXPECT_GE(cum[i], cum[i - 1]);
}

// ---------------------------------------------------------------------------
// Sizing
// ---------------------------------------------------------------------------

TEST(Sizing, TieBreakOrder) {
    EXPECT_EQ(cheapest_option(1.0, 1.0, 1.0), SliceOption::Grid);
    EXPECT_EQ(cheapest_option(2.0, 1.0, 1.0), SliceOption::Pv);
    EXPECT_EQ(cheapest_option(2.0, 1.0, 0.5), SliceOption::PvBattery);
    EXPECT_EQ(cheapest_option(1.0, 1.0, 2.0), SliceOption::Grid);
    EXPECT_EQ(cheapest_option(0.5, 1.0, 0.7), SliceOption::Grid);
}

TEST(Sizing, ExactTieInstallsNothing) {
    // One step, demand exactly one band: grid cost 26*g*F equals PV cost by construction.
    auto p = unit_params(1);
    p.p_sell = 0.0;
    p.c_bat_fixed = 1e9;
    const auto s = year_of_single_steps(2.0, 2.0);
    p.c_pv_fixed = 52.0;  // F * p_buy * 2 = 52
    const auto r = run_scm(s, p);
    EXPECT_EQ(r.curves.c_grid[0], r.curves.c_pv[0]);
    EXPECT_EQ(r.sizing.v_pv, 0.0);
    p.c_pv_fixed = 51.0;
    EXPECT_EQ(run_scm(s, p).sizing.v_pv, 1.0);
}

TEST(Sizing, ProhibitivePvCost) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    p.c_pv_fixed = 1e12;
    const auto r = run_scm(s, p);
    EXPECT_EQ(r.sizing.v_pv, 0.0);
    EXPECT_EQ(r.sizing.v_bat, 0.0);
    EXPECT_EQ(r.sizing.installed_slices, 0u);
    EXPECT_NEAR(r.sizing.annualized_total_cost, s.f_anu() * p.p_buy * s.total_demand(),
                1e-12 * s.f_anu() * p.p_buy * s.total_demand());
}

TEST(Sizing, CountsSlicesAndSumsBatteries) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    p.c_bat_fixed = 2500.0;
    const auto r = run_scm(s, p);
    double v_pv = 0.0, v_bat = 0.0, cost = 0.0, covered = 0.0;
    const auto& c = r.curves;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double best = std::min({c.c_grid[i], c.c_pv[i], c.c_pvbat[i]});
        cost += best;
        covered += r.decomposition.load_total[i];
        if (std::min(c.c_pv[i], c.c_pvbat[i]) < c.c_grid[i]) {
            v_pv += c.width_kw[i];
            if (c.c_pvbat[i] < c.c_pv[i]) v_bat += c.q_bat[i];
        }
    }
    cost += s.f_anu() * p.p_buy * (s.total_demand() - covered);
    EXPECT_DOUBLE_EQ(r.sizing.v_pv, v_pv);
    EXPECT_DOUBLE_EQ(r.sizing.v_bat, v_bat);
    EXPECT_NEAR(r.sizing.annualized_total_cost, cost, 1e-9 * cost);
    EXPECT_GT(r.sizing.v_bat, 0.0);
    EXPECT_EQ(r.sizing.per_day_sold.size(), s.n_d());
    EXPECT_EQ(r.sizing.per_day_charged.size(), s.n_d());
}

TEST(Sizing, ScaleInvarianceOfPrices) {
    const auto s = generate_synthetic(one_month_spec(2));
    TariffAndCostParams p;
    p.c_bat_fixed = 2500.0;
    const auto base = run_scm(s, p).sizing;
    for (double lambda : {0.25, 0.5, 2.0, 8.0}) {
        auto q = p;
        q.c_pv_fixed *= lambda;
        q.c_bat_fixed *= lambda;
        q.p_buy *= lambda;
        q.p_sell *= lambda;
        const auto scaled = run_scm(s, q).sizing;
        EXPECT_EQ(scaled.v_pv, base.v_pv) << lambda;
        EXPECT_EQ(scaled.v_bat, base.v_bat) << lambda;
        EXPECT_EQ(scaled.j_star, base.j_star);
    }
}

TEST(Sizing, MonotoneInPvCost) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    double prev = std::numeric_limits<double>::infinity();
    for (double c_pv : {4000.0, 8000.0, 12000.0, 16000.0, 20000.0, 40000.0}) {
        p.c_pv_fixed = c_pv;
        const double v = run_scm(s, p).sizing.v_pv;
        EXPECT_LE(v, prev);
        prev = v;
    }
}

// ---------------------------------------------------------------------------
// Charge profile
// ---------------------------------------------------------------------------

TEST(ChargeProfile, NoBatterySellsEverything) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    const auto d = decompose(s, p);
    const std::vector<InstalledSlice> installed{{500, 0.0}, {600, 0.0}};
    const auto prof = charge_profile(installed, d, s, p);
    for (std::size_t day = 0; day < s.n_d(); ++day) {
        EXPECT_EQ(prof.charged[day], 0.0);
        EXPECT_NEAR(prof.sold[day], daily_surplus(d, s, 500)[day] + daily_surplus(d, s, 600)[day], 1e-12);
    }
}

TEST(ChargeProfile, SurplusBelowCapIsFullyCharged) {
    const auto s = make_scenario({0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 3.0, 0.0}, 2);
    const auto p = unit_params(1);
    const auto d = decompose(s, p);
    const std::vector<InstalledSlice> installed{{0, 2.0 * p.e_chg}};
    const auto prof = charge_profile(installed, d, s, p);
    EXPECT_DOUBLE_EQ(prof.charged[0], 1.0);
    EXPECT_DOUBLE_EQ(prof.sold[0], 0.0);
    EXPECT_DOUBLE_EQ(prof.charged[1], 2.0);
    EXPECT_DOUBLE_EQ(prof.sold[1], 1.0);
}

TEST(ChargeProfile, ManyDaysAtFullBattery) {
    const auto s = generate_synthetic(one_month_spec());
    TariffAndCostParams p;
    p.c_bat_fixed = 2000.0;
    const auto r = run_scm(s, p);
    ASSERT_GT(r.sizing.v_bat, 0.5);
    const double full = r.sizing.v_bat / p.e_chg;
    int at_full = 0;
    for (double c : r.sizing.per_day_charged) {
        EXPECT_LE(c, full * (1 + 1e-12));
        if (c >= full * (1 - 1e-9)) ++at_full;
    }
    EXPECT_GE(at_full, 5);
}

TEST(ChargeProfile, ChronologicalStepsRespectDailyCap) {
    std::mt19937_64 rng(3);
    const auto s = random_scenario(rng, 4, 12);
    TariffAndCostParams p;
    p.delta_p = 0.5;
    p.m_pv_max = 3.0;
    const auto d = decompose(s, p);
    for (std::size_t i = 0; i < d.n_slices; ++i) {
        const double q_bat = 0.3;
        const auto steps = slice_charge_steps(i, q_bat, d, s, p);
        for (std::size_t day = 0; day < s.n_d(); ++day) {
            const auto [b, e] = s.day_steps(day);
            double total = 0.0;
            for (std::size_t k = b; k < e; ++k) {
                EXPECT_LE(steps[k], d.sur(i, k));
                total += steps[k];
            }
            EXPECT_NEAR(total, std::min(daily_surplus(d, s, i)[day], q_bat / p.e_chg), 1e-12);
        }
    }
}
