#pragma once

/**
 * @file classical.hpp
 * @brief Classical screening curves for dispatchable technologies.
 *
 * Each technology has an annual cost per kW of c(f) = C_fix + C_var * 8760 * f
 * at capacity factor f. The lower envelope of these lines splits [0, 1] into
 * intervals; mapping the interval ends through the load-duration curve gives
 * the capacity each technology should own. Capacity factors are measured
 * relative to the length of the supplied load series.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pvscm/domain.hpp"

namespace pvscm::classical {

inline constexpr double kHoursPerYear = 8760.0;

struct Technology {
    std::string name;
    double c_fix = 0.0;  ///< currency/(kW yr)
    double c_var = 0.0;  ///< currency/kWh
};

/// Segment of the lower envelope owned by one technology.
struct EnvelopeSegment {
    std::size_t technology = 0;
    double f_from = 0.0;
    double f_to = 1.0;
};

struct CapacityBand {
    std::size_t technology = 0;
    double f_from = 0.0;
    double f_to = 1.0;
    double level_low = 0.0;   ///< [kW]
    double level_high = 0.0;  ///< [kW]
    double capacity() const { return level_high - level_low; }
};

struct ClassicalResult {
    std::vector<EnvelopeSegment> envelope;
    std::vector<double> load_duration;  ///< load sorted descending
    std::vector<CapacityBand> bands;
};

inline double screening_cost(const Technology& t, double f) { return t.c_fix + t.c_var * kHoursPerYear * f; }

/// Lower envelope over f in [0, 1]; exact ties go to the lower-index technology.
inline std::vector<EnvelopeSegment> lower_envelope(const std::vector<Technology>& techs) {
    std::vector<double> breaks{0.0, 1.0};
    for (std::size_t a = 0; a < techs.size(); ++a) {
        for (std::size_t b = a + 1; b < techs.size(); ++b) {
            const double dv = (techs[a].c_var - techs[b].c_var) * kHoursPerYear;
            if (dv == 0.0) continue;
            const double f = (techs[b].c_fix - techs[a].c_fix) / dv;
            if (f > 0.0 && f < 1.0) breaks.push_back(f);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto argmin_at = [&](double f) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < techs.size(); ++t) {
            if (screening_cost(techs[t], f) < screening_cost(techs[best], f)) best = t;
        }
        return best;
    };

    std::vector<EnvelopeSegment> env;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const std::size_t t = argmin_at(0.5 * (breaks[s] + breaks[s + 1]));
        if (!env.empty() && env.back().technology == t) {
            env.back().f_to = breaks[s + 1];
        } else {
            env.push_back({t, breaks[s], breaks[s + 1]});
        }
    }
    return env;
}

/// Load level reached or exceeded during at least a fraction f of the steps.
/// level(0) is the peak; the band ending at f = 1 extends down to zero.
inline double duration_level(const std::vector<double>& sorted_desc, double f) {
    if (sorted_desc.empty()) return 0.0;
    if (f <= 0.0) return sorted_desc.front();
    if (f >= 1.0) return 0.0;
    const auto n = static_cast<double>(sorted_desc.size());
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(f * n - 1e-12) - 1.0));
    return sorted_desc[std::min(idx, sorted_desc.size() - 1)];
}

inline ClassicalResult classical_curves(const std::vector<Technology>& techs, const std::vector<double>& load) {
    if (techs.empty()) throw InputError(ErrorKind::InvalidParameter, "at least one technology is required");
    for (const auto& t : techs) {
        if (!std::isfinite(t.c_fix) || !std::isfinite(t.c_var) || t.c_fix < 0.0 || t.c_var < 0.0) {
            throw InputError(ErrorKind::InvalidParameter, "technology '" + t.name + "' has invalid costs");
        }
    }
    for (std::size_t k = 0; k < load.size(); ++k) {
        if (!(load[k] >= 0.0) || !std::isfinite(load[k])) {
            throw InputError(ErrorKind::NegativeValue, "invalid load at step " + std::to_string(k + 1), k + 1);
        }
    }
    ClassicalResult r;
    r.envelope = lower_envelope(techs);
    r.load_duration = load;
    std::sort(r.load_duration.begin(), r.load_duration.end(), std::greater<>());
    for (const auto& seg : r.envelope) {
        CapacityBand band;
        band.technology = seg.technology;
        band.f_from = seg.f_from;
        band.f_to = seg.f_to;
        band.level_high = duration_level(r.load_duration, seg.f_from);
        band.level_low = duration_level(r.load_duration, seg.f_to);
        r.bands.push_back(band);
    }
    return r;
}

}  // namespace pvscm::classical
