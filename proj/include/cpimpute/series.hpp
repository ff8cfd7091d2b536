#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpimpute {

/// Naive local timestamp; no timezone or DST arithmetic is performed.
using Timestamp = std::chrono::sys_seconds;
using Resolution = std::chrono::seconds;
using Date = std::chrono::year_month_day;

using Reading = std::optional<double>;

enum class MeterKind { consumption, generation };

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an imputation method cannot run on its input.
class ImputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolution expressed in hours, so that kWh / h = kW.
double step_hours(Resolution resolution);

/// Cumulative meter readings in kWh on a regular grid.
///
/// Missing readings are absent values, never skipped rows. Reading i is
/// taken at `start + i * resolution`.
struct EnergySeries {
    Timestamp start{};
    Resolution resolution{900};
    std::vector<Reading> values;
    MeterKind meter_kind = MeterKind::consumption;

    std::size_t size() const { return values.size(); }
    Timestamp time_at(std::size_t i) const { return start + resolution * static_cast<long long>(i); }
    std::size_t missing_count() const;
    bool complete() const { return missing_count() == 0; }
};

/// Per-interval average power in kW.
///
/// Position j holds the average over the interval that ends at reading j+1
/// of the energy series it was derived from, i.e. step t = j + 1. The
/// interval starts at `start + j * resolution`, which is also the reading
/// time of its left energy bracket.
struct PowerSeries {
    Timestamp start{};
    Resolution resolution{900};
    std::vector<Reading> values;

    std::size_t size() const { return values.size(); }
    Timestamp interval_start(std::size_t pos) const {
        return start + resolution * static_cast<long long>(pos);
    }
    std::size_t missing_count() const;
    bool complete() const { return missing_count() == 0; }
};

/// Checks the structural invariants: non-empty, at least one reading present,
/// positive resolution and, for consumption meters, monotone non-decreasing
/// present readings up to `tolerance`. Throws SeriesError.
void validate(const EnergySeries& es, double tolerance = 0.0);

PowerSeries energy_to_power(const EnergySeries& es);

/// Inverse of energy_to_power anchored at `base_energy` = e_0.
/// Throws SeriesError if any power value is missing.
EnergySeries power_to_energy(const PowerSeries& ps, double base_energy,
                             MeterKind kind = MeterKind::consumption);

/// Fills the missing readings of `es` by integrating `completed` (which must
/// have no missing values) outward from the nearest present reading. Present
/// readings are copied unchanged.
EnergySeries fill_energy_from_power(const EnergySeries& es, const PowerSeries& completed);

/// For consumption meters, clamps the readings of `filled` that are missing
/// in `es` between the previous reading and the next present one, so a fill
/// that does not preserve gap energy still yields a monotone series.
EnergySeries bound_filled_readings(const EnergySeries& es, const EnergySeries& filled);

/// A maximal run of missing power values.
///
/// `first_step`/`last_step` are power steps t (interval ending at reading
/// t), so the PowerSeries positions are `first_step - 1 .. last_step - 1`.
struct Gap {
    std::size_t first_step = 0;
    std::size_t last_step = 0;
    std::optional<double> anchor_before;
    std::optional<double> anchor_after;
    std::optional<double> actual_energy;

    std::size_t length() const { return last_step - first_step + 1; }
    std::size_t first_pos() const { return first_step - 1; }
    std::size_t last_pos() const { return last_step - 1; }
    bool anchored() const { return actual_energy.has_value(); }
};

/// Gaps of the power series derived from `es`, sorted and disjoint.
std::vector<Gap> detect_gaps(const EnergySeries& es);

/// One calendar day over the power domain. Intervals are assigned to the day
/// in which they start.
struct DayView {
    Date date{};
    std::size_t first_pos = 0;
    std::size_t count = 0;
    std::size_t first_slot = 0;   ///< within-day slot of first_pos
    std::size_t missing = 0;
    double known_energy = 0.0;    ///< kWh, resolution * sum of present power
    bool full = false;            ///< covers every slot of the day

    std::size_t end_pos() const { return first_pos + count; }
};

/// Slots per calendar day; throws SeriesError unless the resolution divides
/// one day evenly.
std::size_t slots_per_day(Resolution resolution);

std::vector<DayView> day_partition(const PowerSeries& ps);

Date date_of(Timestamp t);
std::size_t slot_of_day(Timestamp t, Resolution resolution);
/// ISO weekday, 1 = Monday ... 7 = Sunday.
int iso_weekday(Date d);
/// 1-based position within the calendar year.
int day_of_year(Date d);

}  // namespace cpimpute
