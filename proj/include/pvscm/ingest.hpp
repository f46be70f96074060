#pragma once

/**
 * @file ingest.hpp
 * @brief CSV loading and a seeded synthetic scenario generator.
 *
 * CSV schema: a header row, required columns `demand_kwh` and
 * `irradiation_kwh_m2`, optional `day` (1-based). Without a day column the
 * rows are grouped into 24-step days. UTF-8, comma separated, `.` decimals.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pvscm/domain.hpp"

namespace pvscm {

struct ColumnMap {
    std::string demand = "demand_kwh";
    std::string irradiation = "irradiation_kwh_m2";
    /// Name of the day column. When unset, a column named `day` is used if
    /// present; otherwise rows are grouped into blocks of `steps_per_day`.
    std::optional<std::string> day;
    int steps_per_day = 24;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses CSV text into a validated Scenario. ParseError carries the 1-based
/// file line; validation errors carry the 1-based data row (== step).
inline Scenario parse_csv(std::string_view text, const ColumnMap& columns = {}) {
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto pos = text.find('\n', start);
            if (pos == std::string_view::npos) pos = text.size();
            lines.push_back(text.substr(start, pos - start));
            start = pos + 1;
        }
    }
    std::size_t li = 0;
    while (li < lines.size() && detail::trim(lines[li]).empty()) ++li;
    if (li == lines.size()) throw InputError(ErrorKind::ParseError, "empty CSV input", 1);

    std::string_view header_line = lines[li];
    if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
    const auto header = detail::split_commas(header_line);
    auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        return std::nullopt;
    };
    const auto demand_col = find_col(columns.demand);
    if (!demand_col) throw InputError(ErrorKind::MissingColumn, "missing column '" + columns.demand + "'");
    const auto irr_col = find_col(columns.irradiation);
    if (!irr_col) throw InputError(ErrorKind::MissingColumn, "missing column '" + columns.irradiation + "'");
    std::optional<std::size_t> day_col;
    if (columns.day) {
        day_col = find_col(*columns.day);
        if (!day_col) throw InputError(ErrorKind::MissingColumn, "missing column '" + *columns.day + "'");
    } else {
        day_col = find_col("day");
    }

    ScenarioCandidate cand;
    cand.steps_per_day = columns.steps_per_day;
    for (std::size_t i = li + 1; i < lines.size(); ++i) {
        const auto line = detail::trim(lines[i]);
        if (line.empty()) continue;
        const std::size_t line_no = i + 1;
        const auto fields = detail::split_commas(line);
        auto field = [&](std::size_t c) -> double {
            if (c >= fields.size()) {
                throw InputError(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": too few fields",
                                 line_no);
            }
            const auto v = detail::parse_double(fields[c]);
            if (!v) {
                throw InputError(ErrorKind::ParseError,
                                 "line " + std::to_string(line_no) + ": cannot parse '" + std::string(fields[c]) + "'",
                                 line_no);
            }
            return *v;
        };
        cand.demand.push_back(field(*demand_col));
        cand.irradiation.push_back(field(*irr_col));
        if (day_col) {
            const double d = field(*day_col);
            if (d != std::floor(d) || d < -1e9 || d > 1e9) {
                throw InputError(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": day must be an integer",
                                 line_no);
            }
            cand.day_index.push_back(static_cast<int>(d));
        }
    }
    return validate_scenario(std::move(cand));
}

inline Scenario load_csv(const std::string& path, const ColumnMap& columns = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), columns);
}

/// Serializes a scenario using the documented schema (with a day column).
inline std::string to_csv(const Scenario& s) {
    std::ostringstream out;
    out.precision(17);
    out << "day,demand_kwh,irradiation_kwh_m2\n";
    for (std::size_t k = 0; k < s.n_t(); ++k) {
        out << s.day_index()[k] << ',' << s.demand()[k] << ',' << s.irradiation()[k] << '\n';
    }
    return out.str();
}

// =============================================================================
// Synthetic scenarios
// =============================================================================

/// A contiguous block of days sharing a season. Recognized labels are
/// "winter" (less sun, more demand) and anything else (neutral).
struct SeasonBlock {
    std::string label;
    int days = 0;
    double cloudy_fraction = 0.0;  ///< probability that a day is overcast
};

struct SyntheticSpec {
    int n_days = 30;
    std::uint64_t seed = 1;
    std::vector<SeasonBlock> season_mix;  ///< empty: one neutral block of n_days
    double demand_base = 0.35;            ///< night base load [kWh/step]
    double demand_peak = 1.4;             ///< evening peak load [kWh/step]
    double midday_weight = 1.0;           ///< height of the daytime demand hump relative to the evening peak
    double irr_clear_peak = 0.9;          ///< clear-sky noon irradiation [kWh/(m^2 step)]
    double winter_irradiation_scale = 0.6;
    double winter_demand_scale = 1.3;
    int daylight_start = 6;               ///< first daylight step of a day
    int daylight_end = 18;                ///< one past the last daylight step
    int steps_per_day = 24;
};

inline void validate_synthetic_spec(const SyntheticSpec& spec) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw InputError(ErrorKind::InvalidParameter, what);
    };
    require(spec.n_days > 0, "n_days must be positive");
    require(spec.steps_per_day > 0, "steps_per_day must be positive");
    require(spec.daylight_start >= 0 && spec.daylight_start < spec.daylight_end &&
                spec.daylight_end <= spec.steps_per_day,
            "daylight window must satisfy 0 <= start < end <= steps_per_day");
    require(spec.demand_base >= 0.0 && spec.demand_peak >= 0.0, "demand levels must be >= 0");
    require(spec.irr_clear_peak >= 0.0, "irr_clear_peak must be >= 0");
    require(spec.midday_weight >= 0.0, "midday_weight must be >= 0");
    require(spec.winter_irradiation_scale >= 0.0 && spec.winter_demand_scale >= 0.0, "season scales must be >= 0");
    if (!spec.season_mix.empty()) {
        int total = 0;
        for (const auto& b : spec.season_mix) {
            require(b.days > 0, "season '" + b.label + "' must have a positive day count");
            require(b.cloudy_fraction >= 0.0 && b.cloudy_fraction <= 1.0,
                    "cloudy_fraction of season '" + b.label + "' must be in [0, 1]");
            total += b.days;
        }
        require(total == spec.n_days, "season day counts must sum to n_days");
    }
}

/// Clear-sky irradiation of one step of a day, before season and cloud scaling.
inline double clear_sky_profile(const SyntheticSpec& spec, int step) {
    if (step < spec.daylight_start || step >= spec.daylight_end) return 0.0;
    const double width = spec.daylight_end - spec.daylight_start;
    return spec.irr_clear_peak * std::sin(std::numbers::pi * (step - spec.daylight_start + 0.5) / width);
}

namespace detail {

/// splitmix64; portable across standard libraries, unlike <random> distributions.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline double bump(double hour, double centre, double width) {
    const double z = (hour - centre) / width;
    return std::exp(-0.5 * z * z);
}

}  // namespace detail

/// Deterministic household-like demand and irradiation for a fixed seed.
inline Scenario generate_synthetic(const SyntheticSpec& spec) {
    validate_synthetic_spec(spec);
    std::vector<SeasonBlock> blocks = spec.season_mix;
    if (blocks.empty()) blocks.push_back({"summer", spec.n_days, 0.0});

    detail::SplitMix rng(spec.seed);
    ScenarioCandidate cand;
    const auto spd = static_cast<std::size_t>(spec.steps_per_day);
    cand.demand.reserve(static_cast<std::size_t>(spec.n_days) * spd);
    cand.irradiation.reserve(cand.demand.capacity());
    cand.day_index.reserve(cand.demand.capacity());

    int day = 0;
    for (const auto& block : blocks) {
        const bool winter = block.label == "winter";
        const double irr_scale = winter ? spec.winter_irradiation_scale : 1.0;
        const double dem_scale = winter ? spec.winter_demand_scale : 1.0;
        for (int b = 0; b < block.days; ++b) {
            ++day;
            const bool cloudy = rng.uniform() < block.cloudy_fraction;
            const double day_factor = cloudy ? rng.uniform(0.1, 0.3) : rng.uniform(0.75, 1.0);
            const double day_level = rng.uniform(0.85, 1.15);
            for (int s = 0; s < spec.steps_per_day; ++s) {
                const double hour = (s + 0.5) * 24.0 / spec.steps_per_day;
                const double shape = 0.1 * detail::bump(hour, 7.5, 1.2) + spec.midday_weight * detail::bump(hour, 12.5, 2.5) +
                                     0.8 * detail::bump(hour, 19.5, 1.8);
                const double noise = rng.uniform(0.85, 1.15);
                const double demand =
                    dem_scale * day_level * noise * (spec.demand_base + (spec.demand_peak - spec.demand_base) * shape);
                double irr = clear_sky_profile(spec, s);
                if (irr > 0.0) irr *= irr_scale * day_factor * rng.uniform(0.85, 1.0);
                cand.demand.push_back(demand * 24.0 / spec.steps_per_day);
                cand.irradiation.push_back(irr);
                cand.day_index.push_back(day);
            }
        }
    }
    return validate_scenario(std::move(cand));
}

/// Three seasons in the shape of the base-case data set: 28 winter, 30 rainy
/// and 31 summer days.
inline SyntheticSpec three_season_spec(std::uint64_t seed = 1) {
    SyntheticSpec spec;
    spec.n_days = 89;
    spec.seed = seed;
    spec.season_mix = {{"winter", 28, 0.15}, {"rainy", 30, 0.6}, {"summer", 31, 0.2}};
    return spec;
}

/// 30-day variant: the first ten days of each season.
inline SyntheticSpec one_month_spec(std::uint64_t seed = 1) {
    SyntheticSpec spec;
    spec.n_days = 30;
    spec.seed = seed;
    spec.season_mix = {{"winter", 10, 0.15}, {"rainy", 10, 0.6}, {"summer", 10, 0.2}};
    return spec;
}

/// `months` x 30 days cycling through the three seasons in 10-day blocks.
inline SyntheticSpec months_spec(int months, std::uint64_t seed = 1) {
    SyntheticSpec spec = one_month_spec(seed);
    spec.n_days = 30 * months;
    spec.season_mix.clear();
    for (int m = 0; m < months; ++m) {
        spec.season_mix.push_back({"winter", 10, 0.15});
        spec.season_mix.push_back({"rainy", 10, 0.6});
        spec.season_mix.push_back({"summer", 10, 0.2});
    }
    return spec;
}

// JSON form of SyntheticSpec. Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, SeasonBlock& b) {
    if (j.is_array()) {
        b.label = j.at(0).get<std::string>();
        b.days = j.at(1).get<int>();
        b.cloudy_fraction = j.size() > 2 ? j.at(2).get<double>() : 0.0;
        return;
    }
    b.label = j.at("label").get<std::string>();
    b.days = j.at("days").get<int>();
    b.cloudy_fraction = j.value("cloudy_fraction", 0.0);
}

inline void to_json(nlohmann::json& j, const SeasonBlock& b) {
    j = nlohmann::json{{"label", b.label}, {"days", b.days}, {"cloudy_fraction", b.cloudy_fraction}};
}

inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
    s.n_days = j.value("n_days", s.n_days);
    s.seed = j.value("seed", s.seed);
    if (j.contains("season_mix")) s.season_mix = j.at("season_mix").get<std::vector<SeasonBlock>>();
    s.demand_base = j.value("demand_base", s.demand_base);
    s.demand_peak = j.value("demand_peak", s.demand_peak);
    s.midday_weight = j.value("midday_weight", s.midday_weight);
    s.irr_clear_peak = j.value("irr_clear_peak", s.irr_clear_peak);
    s.winter_irradiation_scale = j.value("winter_irradiation_scale", s.winter_irradiation_scale);
    s.winter_demand_scale = j.value("winter_demand_scale", s.winter_demand_scale);
    s.daylight_start = j.value("daylight_start", s.daylight_start);
    s.daylight_end = j.value("daylight_end", s.daylight_end);
    s.steps_per_day = j.value("steps_per_day", s.steps_per_day);
}

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
    j = nlohmann::json{{"n_days", s.n_days},
                       {"seed", s.seed},
                       {"season_mix", s.season_mix},
                       {"demand_base", s.demand_base},
                       {"demand_peak", s.demand_peak},
                       {"midday_weight", s.midday_weight},
                       {"irr_clear_peak", s.irr_clear_peak},
                       {"winter_irradiation_scale", s.winter_irradiation_scale},
                       {"winter_demand_scale", s.winter_demand_scale},
                       {"daylight_start", s.daylight_start},
                       {"daylight_end", s.daylight_end},
                       {"steps_per_day", s.steps_per_day}};
}

/// Parses a synthetic spec document, mapping JSON errors to InputError.
inline SyntheticSpec parse_synthetic_spec(std::string_view text) {
    try {
        return nlohmann::json::parse(text).get<SyntheticSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(ErrorKind::ParseError, std::string("synthetic spec: ") + e.what());
    }
}

}  // namespace pvscm
