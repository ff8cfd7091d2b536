#include "cpimpute/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cpimpute {

namespace {

template <typename Values>
std::size_t count_missing(const Values& values) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const Reading& r) { return !r; }));
}

}  // namespace

double step_hours(Resolution resolution) {
    return static_cast<double>(resolution.count()) / 3600.0;
}

std::size_t EnergySeries::missing_count() const { return count_missing(values); }
std::size_t PowerSeries::missing_count() const { return count_missing(values); }

void validate(const EnergySeries& es, double tolerance) {
    if (es.values.empty()) throw SeriesError("energy series is empty");
    if (es.resolution.count() <= 0) throw SeriesError("resolution must be positive");
    if (es.missing_count() == es.size()) throw SeriesError("energy series has no present reading");
    if (es.meter_kind != MeterKind::consumption) return;

    // Checking consecutive present readings covers every pair by transitivity
    // only when tolerance is zero, so track the running maximum instead.
    std::optional<double> running_max;
    std::size_t max_index = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto& v = es.values[i];
        if (!v) continue;
        if (running_max && *running_max > *v + tolerance) {
            throw SeriesError("consumption readings decrease between index " +
                              std::to_string(max_index) + " and " + std::to_string(i));
        }
        if (!running_max || *v > *running_max) {
            running_max = *v;
            max_index = i;
        }
    }
}

PowerSeries energy_to_power(const EnergySeries& es) {
    PowerSeries ps;
    ps.start = es.start;
    ps.resolution = es.resolution;
    if (es.size() < 2) return ps;
    const double dt = step_hours(es.resolution);
    ps.values.resize(es.size() - 1);
    for (std::size_t t = 1; t < es.size(); ++t) {
        const auto& prev = es.values[t - 1];
        const auto& cur = es.values[t];
        if (prev && cur) ps.values[t - 1] = (*cur - *prev) / dt;
    }
    return ps;
}

EnergySeries power_to_energy(const PowerSeries& ps, double base_energy, MeterKind kind) {
    EnergySeries es;
    es.start = ps.start;
    es.resolution = ps.resolution;
    es.meter_kind = kind;
    es.values.reserve(ps.size() + 1);
    es.values.emplace_back(base_energy);
    const double dt = step_hours(ps.resolution);
    double e = base_energy;
    for (std::size_t j = 0; j < ps.size(); ++j) {
        if (!ps.values[j]) {
            throw SeriesError("cannot integrate power series: value missing at position " +
                              std::to_string(j));
        }
        e += *ps.values[j] * dt;
        es.values.emplace_back(e);
    }
    return es;
}

EnergySeries fill_energy_from_power(const EnergySeries& es, const PowerSeries& completed) {
    if (completed.size() + 1 != es.size()) throw SeriesError("power series does not match energy series");
    if (!completed.complete()) throw SeriesError("power series used for filling has missing values");
    EnergySeries out = es;
    const double dt = step_hours(es.resolution);
    const std::size_t n = es.size();
    std::size_t i = 0;
    while (i < n) {
        if (out.values[i]) {
            ++i;
            continue;
        }
        const std::size_t run_begin = i;
        while (i < n && !out.values[i]) ++i;
        if (run_begin > 0) {
            double e = *out.values[run_begin - 1];
            for (std::size_t t = run_begin; t < i; ++t) {
                e += *completed.values[t - 1] * dt;
                out.values[t] = e;
            }
        } else {
            if (i == n) throw SeriesError("energy series has no present reading");
            double e = *out.values[i];
            for (std::size_t t = i; t-- > 0;) {
                e -= *completed.values[t] * dt;
                out.values[t] = e;
            }
        }
    }
    return out;
}

EnergySeries bound_filled_readings(const EnergySeries& es, const EnergySeries& filled) {
    if (filled.size() != es.size()) throw SeriesError("filled series does not match energy series");
    EnergySeries out = filled;
    if (es.meter_kind != MeterKind::consumption) return out;
    std::optional<double> upper;
    for (std::size_t i = es.size(); i-- > 0;) {
        if (es.values[i]) {
            upper = es.values[i];
            continue;
        }
        double v = *out.values[i];
        if (upper) v = std::min(v, *upper);
        out.values[i] = v;
    }
    for (std::size_t i = 1; i < es.size(); ++i) {
        if (!es.values[i]) out.values[i] = std::max(*out.values[i], *out.values[i - 1]);
    }
    return out;
}

std::vector<Gap> detect_gaps(const EnergySeries& es) {
    std::vector<Gap> gaps;
    const std::size_t n = es.size();
    if (n < 2) return gaps;
    std::size_t i = 0;
    while (i < n) {
        if (es.values[i]) {
            ++i;
            continue;
        }
        const std::size_t run_begin = i;
        while (i < n && !es.values[i]) ++i;
        const std::size_t run_end = i;  // one past the last missing reading

        Gap g;
        g.first_step = std::max<std::size_t>(run_begin, 1);
        g.last_step = std::min(run_end, n - 1);
        if (run_begin > 0) g.anchor_before = es.values[run_begin - 1];
        if (run_end < n) g.anchor_after = es.values[run_end];
        if (g.anchor_before && g.anchor_after) g.actual_energy = *g.anchor_after - *g.anchor_before;
        gaps.push_back(g);
    }
    return gaps;
}

std::size_t slots_per_day(Resolution resolution) {
    constexpr long long day = 86400;
    if (resolution.count() <= 0 || day % resolution.count() != 0) {
        throw SeriesError("resolution of " + std::to_string(resolution.count()) +
                          " s does not divide a day");
    }
    return static_cast<std::size_t>(day / resolution.count());
}

Date date_of(Timestamp t) {
    return Date{std::chrono::floor<std::chrono::days>(t)};
}

std::size_t slot_of_day(Timestamp t, Resolution resolution) {
    const auto midnight = std::chrono::floor<std::chrono::days>(t);
    return static_cast<std::size_t>((t - midnight) / resolution);
}

int iso_weekday(Date d) {
    return static_cast<int>(std::chrono::weekday{std::chrono::sys_days{d}}.iso_encoding());
}

int day_of_year(Date d) {
    using namespace std::chrono;
    const sys_days jan1{d.year() / January / 1};
    return static_cast<int>((sys_days{d} - jan1).count()) + 1;
}

std::vector<DayView> day_partition(const PowerSeries& ps) {
    std::vector<DayView> days;
    const std::size_t per_day = slots_per_day(ps.resolution);
    const double dt = step_hours(ps.resolution);
    std::size_t pos = 0;
    while (pos < ps.size()) {
        DayView day;
        const Timestamp t = ps.interval_start(pos);
        day.date = date_of(t);
        day.first_pos = pos;
        day.first_slot = slot_of_day(t, ps.resolution);
        const std::size_t remaining_in_day = per_day - day.first_slot;
        day.count = std::min(remaining_in_day, ps.size() - pos);
        day.full = day.first_slot == 0 && day.count == per_day;
        double sum = 0.0;
        for (std::size_t j = pos; j < pos + day.count; ++j) {
            if (ps.values[j]) sum += *ps.values[j];
            else ++day.missing;
        }
        day.known_energy = sum * dt;
        days.push_back(day);
        pos += day.count;
    }
    return days;
}

}  // namespace cpimpute
