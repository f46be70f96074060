#pragma once

/**
 * @file scm.hpp
 * @brief Screening-curve estimation of PV and battery sizes for a household
 *        on a flat self-consumption tariff.
 *
 * The chronological load is cut into horizontal bands ("slices") whose height
 * at step k equals the output of a delta_p kW PV array at that step. For each
 * slice three options are costed per year:
 *   - buy the slice's covered load from the grid,
 *   - install delta_p kW of PV and export the slice's surplus,
 *   - install delta_p kW of PV plus the battery that maximizes the annual
 *     value of storing daily surplus for later use.
 * The PV size is the total width of slices where a PV option is cheapest; the
 * battery size is the sum of the per-slice batteries where PV + battery wins.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "pvscm/domain.hpp"

namespace pvscm {

// =============================================================================
// Slice decomposition
// =============================================================================

namespace detail {

// Leaves elements uninitialized on resize; the decomposition overwrites every
// entry, so zero-filling megabytes first is wasted work.
template <class T>
struct default_init_allocator : std::allocator<T> {
    template <class U>
    struct rebind {
        using other = default_init_allocator<U>;
    };
    using std::allocator<T>::allocator;
    template <class U>
    void construct(U* ptr) noexcept(std::is_nothrow_default_constructible_v<U>) {
        ::new (static_cast<void*>(ptr)) U;
    }
    template <class U, class... Args>
    void construct(U* ptr, Args&&... args) {
        ::new (static_cast<void*>(ptr)) U(std::forward<Args>(args)...);
    }
};

}  // namespace detail

struct SliceDecomposition {
    using Buffer = std::vector<double, detail::default_init_allocator<double>>;

    std::size_t n_slices = 0;
    std::size_t n_t = 0;
    std::size_t n_d = 0;
    std::vector<double> width_kw;   ///< slice widths; all delta_p except maybe the last
    std::vector<double> unit_gen;   ///< g_k: output of a delta_p kW array per step [kWh]
    Buffer q_load;                  ///< covered load, row-major [slice][step]
    Buffer q_sur;                   ///< surplus, row-major [slice][step]
    std::vector<double> load_total; ///< per slice, summed over all steps
    std::vector<double> sur_total;  ///< per slice, summed over all steps
    Buffer day_sur;                 ///< surplus per day, row-major [slice][day]

    std::span<const double> load_row(std::size_t i) const { return {q_load.data() + i * n_t, n_t}; }
    std::span<const double> sur_row(std::size_t i) const { return {q_sur.data() + i * n_t, n_t}; }
    std::span<const double> daily_sur_row(std::size_t i) const { return {day_sur.data() + i * n_d, n_d}; }
    double load(std::size_t i, std::size_t k) const { return q_load[i * n_t + k]; }
    double sur(std::size_t i, std::size_t k) const { return q_sur[i * n_t + k]; }

    /// Upper edge of slice i in kW.
    double level_kw(std::size_t i) const {
        double s = 0.0;
        for (std::size_t r = 0; r <= i; ++r) s += width_kw[r];
        return s;
    }
};

/// Number of slices needed to cover [0, m_pv_max] with width delta_p.
inline std::size_t slice_count(const TariffAndCostParams& p) {
    const double ratio = p.m_pv_max / p.delta_p;
    const double n = std::ceil(ratio - 1e-9 * std::max(1.0, ratio));
    return static_cast<std::size_t>(std::max(1.0, n));
}

/// Slice i (0-based) covers, at step k, the band [i*g_k, i*g_k + w_i/delta_p*g_k].
inline SliceDecomposition decompose(const Scenario& s, const TariffAndCostParams& p) {
    validate_params(p);
    SliceDecomposition d;
    d.n_slices = slice_count(p);
    d.n_t = s.n_t();
    d.width_kw.assign(d.n_slices, p.delta_p);
    const double last = p.m_pv_max - static_cast<double>(d.n_slices - 1) * p.delta_p;
    if (std::abs(last - p.delta_p) > 1e-9 * p.delta_p) d.width_kw.back() = last;

    d.unit_gen.resize(d.n_t);
    for (std::size_t k = 0; k < d.n_t; ++k) {
        d.unit_gen[k] = s.irradiation()[k] * p.e_pv * p.delta_p / p.g_stc;
    }
    d.n_d = s.n_d();
    d.q_load.resize(d.n_slices * d.n_t);
    d.q_sur.resize(d.n_slices * d.n_t);
    d.day_sur.resize(d.n_slices * d.n_d);
    d.load_total.resize(d.n_slices);
    d.sur_total.resize(d.n_slices);
    const auto& demand = s.demand();
    for (std::size_t i = 0; i < d.n_slices; ++i) {
        const double band_scale = d.width_kw[i] / p.delta_p;
        double* load = d.q_load.data() + i * d.n_t;
        double* sur = d.q_sur.data() + i * d.n_t;
        const double lower_mult = static_cast<double>(i);
        double load_acc = 0.0;
        double sur_acc = 0.0;
        for (std::size_t day = 0; day < d.n_d; ++day) {
            const auto [b, e] = s.day_steps(day);
            double day_acc = 0.0;
            for (std::size_t k = b; k < e; ++k) {
                const double g = d.unit_gen[k];
                const double band = band_scale == 1.0 ? g : g * band_scale;
                const double covered = std::min(band, std::max(0.0, demand[k] - lower_mult * g));
                load[k] = covered;
                sur[k] = band - covered;
                load_acc += covered;
                sur_acc += sur[k];
                day_acc += sur[k];
            }
            d.day_sur[i * d.n_d + day] = day_acc;
        }
        d.load_total[i] = load_acc;
        d.sur_total[i] = sur_acc;
    }
    return d;
}

/// Total surplus of slice i on each day.
inline std::vector<double> daily_surplus(const SliceDecomposition& d, const Scenario& /*s*/, std::size_t i) {
    const auto row = d.daily_sur_row(i);
    return {row.begin(), row.end()};
}

// =============================================================================
// Cost curves
// =============================================================================

/// Annual cost of buying slice i's covered load.
inline double cost_grid(std::size_t i, const SliceDecomposition& d, const Scenario& s, const TariffAndCostParams& p) {
    return s.f_anu() * p.p_buy * d.load_total[i];
}

/// Annual cost of PV without battery for slice i.
inline double cost_pv(std::size_t i, const SliceDecomposition& d, const Scenario& s, const TariffAndCostParams& p) {
    return p.c_pv_fixed * d.width_kw[i] - s.f_anu() * p.p_sell * d.sur_total[i];
}

/// Largest day rank J whose battery increment still pays:
///   J = floor(n_d + 1 - c_bat e_chg / (f_anu (p_buy e_dis e_chg - p_sell))), clamped to [0, n_d].
/// Throws InputError(NonViableTariff) when the denominator is not positive.
inline int compute_j(const TariffAndCostParams& p, std::size_t n_d, double f_anu) {
    const double margin = p.p_buy * p.e_dis * p.e_chg - p.p_sell;
    if (!(margin > 0.0)) {
        throw InputError(ErrorKind::NonViableTariff, "p_buy * e_dis * e_chg <= p_sell: storing surplus never pays");
    }
    const double nd = static_cast<double>(n_d);
    const double raw = std::floor(nd + 1.0 - p.c_bat_fixed * p.e_chg / (f_anu * margin));
    return static_cast<int>(std::clamp(raw, 0.0, nd));
}

inline int compute_j(const Scenario& s, const TariffAndCostParams& p) { return compute_j(p, s.n_d(), s.f_anu()); }

/// compute_j with non-viable tariffs mapped to J = 0.
inline int j_star(const TariffAndCostParams& p, std::size_t n_d, double f_anu) {
    if (!viability(p) || !(p.p_buy * p.e_dis * p.e_chg > p.p_sell)) return 0;
    return compute_j(p, n_d, f_anu);
}

inline int j_star(const Scenario& s, const TariffAndCostParams& p) { return j_star(p, s.n_d(), s.f_anu()); }

/// Days sorted ascending by surplus; ties keep the original day order.
inline std::vector<std::size_t> order_days(std::span<const double> daily_sur) {
    std::vector<std::size_t> order(daily_sur.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return daily_sur[a] < daily_sur[b]; });
    return order;
}

struct SliceBattery {
    double q_bat = 0.0;            ///< battery sized to store the J-th smallest daily surplus [kWh]
    double q_chg_total = 0.0;      ///< total charged energy over the period [kWh]
    std::vector<std::size_t> day_order;
};

inline SliceBattery battery_for_slice(std::span<const double> daily_sur, double e_chg, int J) {
    SliceBattery out;
    out.day_order = order_days(daily_sur);
    if (J <= 0) return out;
    const auto nd = daily_sur.size();
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(J), nd);
    double prefix = 0.0;
    for (std::size_t r = 0; r < j; ++r) prefix += daily_sur[out.day_order[r]];
    const double cap_day = daily_sur[out.day_order[j - 1]];
    out.q_bat = e_chg * cap_day;
    out.q_chg_total = prefix + static_cast<double>(nd - j) * cap_day;
    return out;
}

inline SliceBattery battery_for_slice(std::size_t i, const SliceDecomposition& d, const Scenario& /*s*/,
                                      const TariffAndCostParams& p, int J) {
    return battery_for_slice(d.daily_sur_row(i), p.e_chg, J);
}

/// Marginal annual benefit B_j (j = 1..n_d, returned 0-based) of growing the
/// battery from the (j-1)-th to the j-th smallest daily surplus.
inline std::vector<double> marginal_benefits(std::span<const double> daily_sur, const TariffAndCostParams& p,
                                             double f_anu) {
    const auto order = order_days(daily_sur);
    const std::size_t nd = daily_sur.size();
    std::vector<double> b(nd);
    double prev_q = 0.0;
    const double unit = p.p_buy * p.e_dis - p.p_sell / p.e_chg;
    for (std::size_t j = 1; j <= nd; ++j) {
        const double q = p.e_chg * daily_sur[order[j - 1]];
        const double dq = q - prev_q;
        b[j - 1] = (f_anu * static_cast<double>(nd - j + 1) * unit - p.c_bat_fixed) * dq;
        prev_q = q;
    }
    return b;
}

inline std::vector<double> marginal_benefits(std::size_t i, const SliceDecomposition& d, const Scenario& s,
                                             const TariffAndCostParams& p) {
    return marginal_benefits(d.daily_sur_row(i), p, s.f_anu());
}

/// Closed-form annual cost of PV + battery for a slice given its total surplus
/// and battery data.
inline double cost_pv_battery(double width_kw, double total_surplus, const SliceBattery& bat,
                              const TariffAndCostParams& p, double f_anu) {
    return p.c_pv_fixed * width_kw + p.c_bat_fixed * bat.q_bat - f_anu * p.p_sell * total_surplus -
           f_anu * (p.p_buy * p.e_dis * p.e_chg - p.p_sell) * bat.q_chg_total;
}

inline double cost_pv_battery(std::size_t i, const SliceDecomposition& d, const Scenario& s,
                              const TariffAndCostParams& p, int J) {
    return cost_pv_battery(d.width_kw[i], d.sur_total[i], battery_for_slice(d.daily_sur_row(i), p.e_chg, J), p,
                           s.f_anu());
}

struct ScreeningCurveSet {
    std::vector<double> level_kw;   ///< upper edge of each slice
    std::vector<double> width_kw;
    std::vector<double> c_grid;     ///< [currency/yr] per slice
    std::vector<double> c_pv;
    std::vector<double> c_pvbat;
    std::vector<double> q_bat;      ///< [kWh] per slice
    std::vector<double> q_chg_total;
    std::vector<double> total_surplus;  ///< [kWh] per slice over the period
    int j_star = 0;

    std::size_t size() const noexcept { return c_grid.size(); }

    /// Curve divided by the slice width: currency/(kW yr).
    static std::vector<double> per_kw(const std::vector<double>& curve, const std::vector<double>& width) {
        std::vector<double> out(curve.size());
        for (std::size_t i = 0; i < curve.size(); ++i) out[i] = curve[i] / width[i];
        return out;
    }
    std::vector<double> c_grid_per_kw() const { return per_kw(c_grid, width_kw); }
    std::vector<double> c_pv_per_kw() const { return per_kw(c_pv, width_kw); }
    std::vector<double> c_pvbat_per_kw() const { return per_kw(c_pvbat, width_kw); }

    /// Running sum of q_bat up to each slice.
    std::vector<double> cumulative_battery() const {
        std::vector<double> out(q_bat.size());
        std::partial_sum(q_bat.begin(), q_bat.end(), out.begin());
        return out;
    }
};

inline ScreeningCurveSet build_curves(const SliceDecomposition& d, const Scenario& s, const TariffAndCostParams& p) {
    ScreeningCurveSet c;
    const std::size_t n = d.n_slices;
    c.j_star = j_star(s, p);
    c.level_kw.resize(n);
    c.width_kw = d.width_kw;
    c.c_grid.resize(n);
    c.c_pv.resize(n);
    c.c_pvbat.resize(n);
    c.q_bat.resize(n);
    c.q_chg_total.resize(n);
    c.total_surplus.resize(n);
    double level = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        level += d.width_kw[i];
        c.level_kw[i] = level;
        c.c_grid[i] = cost_grid(i, d, s, p);
        const double total = d.sur_total[i];
        const SliceBattery bat = battery_for_slice(d.daily_sur_row(i), p.e_chg, c.j_star);
        c.total_surplus[i] = total;
        c.c_pv[i] = cost_pv(i, d, s, p);
        c.c_pvbat[i] = cost_pv_battery(d.width_kw[i], total, bat, p, s.f_anu());
        c.q_bat[i] = bat.q_bat;
        c.q_chg_total[i] = bat.q_chg_total;
    }
    return c;
}

inline ScreeningCurveSet build_curves(const Scenario& s, const TariffAndCostParams& p) {
    return build_curves(decompose(s, p), s, p);
}

// =============================================================================
// Sizing
// =============================================================================

enum class SliceOption { Grid, Pv, PvBattery };

/// Least-cost option; exact ties go to the grid, then to PV without battery.
inline SliceOption cheapest_option(double c_grid, double c_pv, double c_pvbat) {
    if (c_grid <= c_pv && c_grid <= c_pvbat) return SliceOption::Grid;
    if (c_pv <= c_pvbat) return SliceOption::Pv;
    return SliceOption::PvBattery;
}

struct InstalledSlice {
    std::size_t index = 0;
    double q_bat = 0.0;  ///< 0 for PV-only slices
};

struct DailyProfile {
    std::vector<double> charged;  ///< [kWh] per day
    std::vector<double> sold;     ///< [kWh] per day
};

/// Per-day charged and sold energy over the installed slices: each slice
/// charges min(daily surplus, q_bat / e_chg) and exports the rest.
inline DailyProfile charge_profile(std::span<const InstalledSlice> installed, const SliceDecomposition& d,
                                   const Scenario& s, const TariffAndCostParams& p) {
    DailyProfile out;
    out.charged.assign(s.n_d(), 0.0);
    out.sold.assign(s.n_d(), 0.0);
    for (const auto& slice : installed) {
        const auto sur = d.daily_sur_row(slice.index);
        const double cap = slice.q_bat / p.e_chg;
        for (std::size_t day = 0; day < sur.size(); ++day) {
            const double charged = std::min(sur[day], cap);
            out.charged[day] += charged;
            out.sold[day] += sur[day] - charged;
        }
    }
    return out;
}

/// Step-level charging of one slice: surplus is charged chronologically until
/// the daily cap q_bat / e_chg is reached.
inline std::vector<double> slice_charge_steps(std::size_t i, double q_bat, const SliceDecomposition& d,
                                              const Scenario& s, const TariffAndCostParams& p) {
    std::vector<double> q_chg(d.n_t, 0.0);
    const auto row = d.sur_row(i);
    const double cap = q_bat / p.e_chg;
    for (std::size_t day = 0; day < s.n_d(); ++day) {
        const auto [b, e] = s.day_steps(day);
        double room = cap;
        for (std::size_t k = b; k < e && room > 0.0; ++k) {
            const double c = std::min(row[k], room);
            q_chg[k] = c;
            room -= c;
        }
    }
    return q_chg;
}

inline SizingEstimate estimate_sizing(const ScreeningCurveSet& c, const SliceDecomposition& d, const Scenario& s,
                                      const TariffAndCostParams& p) {
    SizingEstimate est;
    est.j_star = c.j_star;
    std::vector<InstalledSlice> installed;
    double curve_cost = 0.0;
    double covered = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto option = cheapest_option(c.c_grid[i], c.c_pv[i], c.c_pvbat[i]);
        covered += d.load_total[i];
        switch (option) {
            case SliceOption::Grid:
                curve_cost += c.c_grid[i];
                if (!est.first_crossing_slice) {
                    est.first_crossing_slice = i;
                    est.first_crossing_kw = c.level_kw[i] - c.width_kw[i];
                }
                break;
            case SliceOption::Pv:
                curve_cost += c.c_pv[i];
                est.v_pv += c.width_kw[i];
                installed.push_back({i, 0.0});
                break;
            case SliceOption::PvBattery:
                curve_cost += c.c_pvbat[i];
                est.v_pv += c.width_kw[i];
                est.v_bat += c.q_bat[i];
                installed.push_back({i, c.q_bat[i]});
                break;
        }
    }
    est.installed_slices = installed.size();
    const double uncovered = std::max(0.0, s.total_demand() - covered);
    est.annualized_total_cost = curve_cost + s.f_anu() * p.p_buy * uncovered;
    auto profile = charge_profile(installed, d, s, p);
    est.per_day_charged = std::move(profile.charged);
    est.per_day_sold = std::move(profile.sold);
    return est;
}

/// Full pipeline: decompose, build curves, extract sizes.
struct ScmResult {
    SliceDecomposition decomposition;
    ScreeningCurveSet curves;
    SizingEstimate sizing;
};

inline ScmResult run_scm(const Scenario& s, const TariffAndCostParams& p) {
    ScmResult r;
    r.decomposition = decompose(s, p);
    r.curves = build_curves(r.decomposition, s, p);
    r.sizing = estimate_sizing(r.curves, r.decomposition, s, p);
    return r;
}

}  // namespace pvscm
