#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cpimpute/execution.hpp"
#include "cpimpute/series.hpp"

namespace cpimpute {

/// Weights of the energy, weekday and seasonal distance terms.
struct DissimilarityWeights {
    double energy = 5.0;
    double weekday = 1.0;
    double season = 10.0;

    /// Throws std::invalid_argument on negative weights or an all-zero triple.
    void validate() const;
    bool operator==(const DissimilarityWeights&) const = default;
};

struct SeasonContext {
    int cycle_length = 365;
    double e_min = 0.0;
    double e_max = 1.0;
};

/// Daily totals modelled as intercept + slope * day + weekday offset.
struct WeeklyPattern {
    std::array<double, 7> offsets{};  ///< index 0 = Monday; sums to zero
    double intercept = 0.0;           ///< kWh at the origin day
    double slope = 0.0;               ///< kWh per day
    std::chrono::sys_days origin{};

    double offset(int iso_weekday) const { return offsets[static_cast<std::size_t>(iso_weekday - 1)]; }
};

struct DailyTotal {
    Date date{};
    double energy = 0.0;
};

/// Properties used to compare days.
struct DayRecord {
    Date date{};
    std::optional<double> energy;  ///< absent for days touched by an unanchored gap
    int weekday = 1;               ///< 1 = Monday ... 7 = Sunday
    int season_pos = 1;            ///< day of year
    bool complete = false;
    bool estimated = false;
    bool full = false;             ///< day has every slot inside the series
    std::size_t day_index = 0;     ///< index into the day partition
};

struct GapAudit {
    Gap gap;
    std::vector<Date> matched_dates;  ///< one per target day the gap touches
    double pasted_energy = 0.0;       ///< resolution * sum of pasted values, before scaling
    double scale_factor = 1.0;
    bool anchored = false;
    bool uniform_fallback = false;
};

struct ImputationResult {
    PowerSeries completed_power;
    EnergySeries completed_energy;
    std::vector<GapAudit> per_gap;
};

struct CpiConfig {
    DissimilarityWeights weights{};
    bool scale = true;
    ExecutionPolicy execution{};
};

/// Fills every missing reading that has present neighbours on both sides
/// with their mean. Longer runs are left untouched.
EnergySeries interpolate_singles(const EnergySeries& es);

/// Least-squares fit of daily totals on [1, day index, six weekday dummies],
/// with weekday effects re-centred to zero mean. Requires at least 14 days
/// and at least one day per weekday.
WeeklyPattern fit_weekly_pattern(std::span<const DailyTotal> complete_days);

/// Estimated total energy of every day in `days`.
///
/// Each anchored gap's energy is split across the days it touches in
/// proportion to their missing values, then shifted by the weekly pattern
/// with a zero-sum correction, then clamped at zero and rescaled. Days
/// without gaps get their known energy. Throws ImputationError when an
/// unanchored gap is passed in.
std::vector<double> estimate_daily_energy(std::span<const DayView> days, std::span<const Gap> gaps,
                                          const WeeklyPattern& pattern, Resolution resolution);

/// One record per day. `estimates[i]` is the estimated total for day i when
/// it has gaps (ignored otherwise). Partial days have their energy scaled to
/// a full-day equivalent.
std::vector<DayRecord> compile_day_records(std::span<const DayView> days,
                                           std::span<const std::optional<double>> estimates,
                                           std::size_t slots_per_day);

/// Cycle length 366 if any day is a leap day position, else 365; energy range
/// over all records that carry an energy. A degenerate range is widened so
/// that the energy distance evaluates to zero.
SeasonContext make_season_context(std::span<const DayRecord> records);

double energy_distance(double a, double b, const SeasonContext& ctx);
double weekday_distance(int a, int b);
double season_distance(int a, int b, int cycle_length);

/// w_e * energy + w_w * weekday + w_s * season.
double weighted_dissimilarity(const DissimilarityWeights& w, double energy, double weekday, double season);

/// Weighted sum of the three distances. The energy term is dropped when
/// either day has no energy.
double dissimilarity(const DayRecord& a, const DayRecord& b, const DissimilarityWeights& w,
                     const SeasonContext& ctx);

/// Argmin of the dissimilarity; ties go to the calendar-closest candidate,
/// then to the earlier date. Throws ImputationError on an empty list.
std::size_t select_best_match(const DayRecord& target, std::span<const DayRecord> candidates,
                              const DissimilarityWeights& w, const SeasonContext& ctx);

struct DayMatch {
    std::size_t target_day = 0;  ///< partition index
    std::size_t source_day = 0;  ///< partition index of a full complete day
};

/// Pastes matched days into the missing values of `ps` slot by slot and,
/// when `scale` is set, rescales each anchored gap to its actual energy.
/// `es` is the energy series `ps` was derived from.
ImputationResult copy_paste_and_scale(const EnergySeries& es, const PowerSeries& ps,
                                      std::span<const DayView> days, std::span<const Gap> gaps,
                                      std::span<const DayMatch> matches, bool scale);

/// Weight-independent preprocessing of one series.
struct CpiPlan {
    EnergySeries energy;  ///< after single-value interpolation
    PowerSeries power;
    std::vector<DayView> days;
    std::vector<Gap> gaps;
    std::vector<DayRecord> records;
    std::vector<DayRecord> targets;     ///< days with missing values
    std::vector<DayRecord> candidates;  ///< full complete days
    SeasonContext context;
    std::optional<WeeklyPattern> pattern;
};

CpiPlan prepare_cpi(const EnergySeries& es);
ImputationResult run_cpi(const CpiPlan& plan, const CpiConfig& config);

/// Full pipeline: single interpolation, weekly pattern, daily estimates,
/// day records, matching and energy-preserving copy-paste.
ImputationResult impute_cpi(const EnergySeries& es, const CpiConfig& config = {});

}  // namespace cpimpute
