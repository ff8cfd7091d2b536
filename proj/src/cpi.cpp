#include "cpimpute/cpi.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cpimpute/kernels.hpp"

namespace cpimpute {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::array<const char*, 7> kWeekdayNames{"Monday", "Tuesday", "Wednesday", "Thursday",
                                                    "Friday", "Saturday", "Sunday"};

/// Index of the day containing power position `pos`.
std::size_t day_containing(std::span<const DayView> days, std::size_t pos) {
    auto it = std::upper_bound(days.begin(), days.end(), pos,
                               [](std::size_t p, const DayView& d) { return p < d.first_pos; });
    return static_cast<std::size_t>(std::distance(days.begin(), it)) - 1;
}

struct DayShare {
    std::size_t day = 0;
    std::size_t missing = 0;
};

/// Days overlapped by a gap and the number of the gap's values in each.
std::vector<DayShare> gap_day_shares(std::span<const DayView> days, const Gap& gap) {
    std::vector<DayShare> out;
    for (std::size_t d = day_containing(days, gap.first_pos());
         d < days.size() && days[d].first_pos <= gap.last_pos(); ++d) {
        const std::size_t lo = std::max(days[d].first_pos, gap.first_pos());
        const std::size_t hi = std::min(days[d].end_pos() - 1, gap.last_pos());
        out.push_back({d, hi - lo + 1});
    }
    return out;
}

long long calendar_distance(const Date& a, const Date& b) {
    const auto diff = (std::chrono::sys_days{a} - std::chrono::sys_days{b}).count();
    return diff < 0 ? -diff : diff;
}

}  // namespace

void DissimilarityWeights::validate() const {
    if (!(energy >= 0.0) || !(weekday >= 0.0) || !(season >= 0.0)) {
        throw std::invalid_argument("dissimilarity weights must be non-negative");
    }
    if (energy + weekday + season <= 0.0) {
        throw std::invalid_argument("at least one dissimilarity weight must be positive");
    }
}

EnergySeries interpolate_singles(const EnergySeries& es) {
    EnergySeries out = es;
    for (std::size_t i = 1; i + 1 < es.size(); ++i) {
        if (!es.values[i] && es.values[i - 1] && es.values[i + 1]) {
            out.values[i] = (*es.values[i - 1] + *es.values[i + 1]) / 2.0;
        }
    }
    return out;
}

WeeklyPattern fit_weekly_pattern(std::span<const DailyTotal> complete_days) {
    std::array<std::size_t, 7> per_weekday{};
    for (const auto& d : complete_days) ++per_weekday[static_cast<std::size_t>(iso_weekday(d.date) - 1)];
    std::string absent;
    for (std::size_t w = 0; w < 7; ++w) {
        if (per_weekday[w] == 0) absent += (absent.empty() ? "" : ", ") + std::string(kWeekdayNames[w]);
    }
    if (!absent.empty()) throw ImputationError("no complete day for weekday(s): " + absent);
    if (complete_days.size() < 14) {
        throw ImputationError("weekly pattern needs at least 14 complete days, got " +
                              std::to_string(complete_days.size()));
    }

    std::chrono::sys_days origin{Date{complete_days.front().date}};
    for (const auto& d : complete_days) origin = std::min(origin, std::chrono::sys_days{d.date});

    const auto rows = static_cast<Eigen::Index>(complete_days.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, 8);
    Eigen::VectorXd totals(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& d = complete_days[static_cast<std::size_t>(r)];
        design(r, 0) = 1.0;
        design(r, 1) = static_cast<double>((std::chrono::sys_days{d.date} - origin).count());
        const int w = iso_weekday(d.date);
        if (w > 1) design(r, w) = 1.0;  // Monday is the reference level
        totals(r) = d.energy;
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(totals);

    WeeklyPattern p;
    p.origin = origin;
    std::array<double, 7> effects{};
    for (std::size_t w = 1; w < 7; ++w) effects[w] = coef(static_cast<Eigen::Index>(w + 1));
    const double mean = std::accumulate(effects.begin(), effects.end(), 0.0) / 7.0;
    for (std::size_t w = 0; w < 7; ++w) p.offsets[w] = effects[w] - mean;
    p.intercept = coef(0) + mean;
    p.slope = coef(1);
    return p;
}

std::vector<double> estimate_daily_energy(std::span<const DayView> days, std::span<const Gap> gaps,
                                          const WeeklyPattern& pattern, Resolution resolution) {
    const auto per_day = static_cast<double>(slots_per_day(resolution));
    std::vector<double> totals(days.size());
    for (std::size_t d = 0; d < days.size(); ++d) totals[d] = days[d].known_energy;

    for (const Gap& gap : gaps) {
        if (!gap.anchored()) {
            throw ImputationError("cannot estimate daily energy for an unanchored gap at step " +
                                  std::to_string(gap.first_step));
        }
        const double energy = *gap.actual_energy;
        const auto shares = gap_day_shares(days, gap);
        const auto gap_len = static_cast<double>(gap.length());

        // Pattern shift of each day scaled by the fraction of the day that is
        // missing; the f-weighted mean is subtracted so the gap total holds.
        std::vector<double> fraction(shares.size()), shift(shares.size());
        double total_shift = 0.0;
        for (std::size_t k = 0; k < shares.size(); ++k) {
            const auto m = static_cast<double>(shares[k].missing);
            fraction[k] = m / gap_len;
            shift[k] = m / per_day * pattern.offset(iso_weekday(days[shares[k].day].date));
            total_shift += shift[k];
        }
        std::vector<double> alloc(shares.size());
        bool negative = false;
        for (std::size_t k = 0; k < shares.size(); ++k) {
            alloc[k] = energy * fraction[k] + shift[k] - fraction[k] * total_shift;
            negative = negative || alloc[k] < 0.0;
        }
        if (negative && energy > 0.0) {
            double sum = 0.0;
            for (double& a : alloc) {
                a = std::max(a, 0.0);
                sum += a;
            }
            for (double& a : alloc) a *= energy / sum;
        }
        for (std::size_t k = 0; k < shares.size(); ++k) totals[shares[k].day] += alloc[k];
    }
    return totals;
}

std::vector<DayRecord> compile_day_records(std::span<const DayView> days,
                                           std::span<const std::optional<double>> estimates,
                                           std::size_t slots_per_day) {
    std::vector<DayRecord> out;
    out.reserve(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) {
        const DayView& day = days[i];
        DayRecord r;
        r.date = day.date;
        r.weekday = iso_weekday(day.date);
        r.season_pos = day_of_year(day.date);
        r.complete = day.missing == 0;
        r.full = day.full;
        r.day_index = i;
        if (r.complete) {
            r.energy = day.known_energy;
        } else if (i < estimates.size() && estimates[i]) {
            r.energy = *estimates[i];
            r.estimated = true;
        }
        if (r.energy && !r.full && day.count > 0) {
            *r.energy *= static_cast<double>(slots_per_day) / static_cast<double>(day.count);
        }
        out.push_back(r);
    }
    return out;
}

SeasonContext make_season_context(std::span<const DayRecord> records) {
    SeasonContext ctx;
    bool first = true;
    for (const auto& r : records) {
        if (r.season_pos == 366 || (r.date.month() == std::chrono::February &&
                                    r.date.day() == std::chrono::day{29})) {
            ctx.cycle_length = 366;
        }
        const bool in_range = r.energy && ((r.complete && r.full) || r.estimated);
        if (!in_range) continue;
        if (first) {
            ctx.e_min = ctx.e_max = *r.energy;
            first = false;
        } else {
            ctx.e_min = std::min(ctx.e_min, *r.energy);
            ctx.e_max = std::max(ctx.e_max, *r.energy);
        }
    }
    if (first) {
        ctx.e_min = 0.0;
        ctx.e_max = 1.0;
    } else if (!(ctx.e_max > ctx.e_min)) {
        ctx.e_max = ctx.e_min + 1.0;
    }
    return ctx;
}

double energy_distance(double a, double b, const SeasonContext& ctx) {
    if (!(ctx.e_max > ctx.e_min)) throw std::invalid_argument("season context needs e_max > e_min");
    return std::abs(a - b) / (ctx.e_max - ctx.e_min);
}

double weekday_distance(int a, int b) {
    if (a == b) return 0.0;
    const bool a_work = a <= 5;
    const bool b_work = b <= 5;
    return a_work == b_work ? 0.5 : 1.0;
}

double season_distance(int a, int b, int cycle_length) {
    const int half = cycle_length / 2;
    const int delta = std::abs(a - b);
    if (delta <= half) return static_cast<double>(delta) / half;
    return static_cast<double>(cycle_length - delta) / half;
}

double weighted_dissimilarity(const DissimilarityWeights& w, double energy, double weekday, double season) {
    return w.energy * energy + w.weekday * weekday + w.season * season;
}

double dissimilarity(const DayRecord& a, const DayRecord& b, const DissimilarityWeights& w,
                     const SeasonContext& ctx) {
    const double de = a.energy && b.energy ? energy_distance(*a.energy, *b.energy, ctx) : 0.0;
    return weighted_dissimilarity(w, de, weekday_distance(a.weekday, b.weekday),
                                  season_distance(a.season_pos, b.season_pos, ctx.cycle_length));
}

std::size_t select_best_match(const DayRecord& target, std::span<const DayRecord> candidates,
                              const DissimilarityWeights& w, const SeasonContext& ctx) {
    if (candidates.empty()) throw ImputationError("no complete day available");
    std::size_t best = 0;
    double best_d = dissimilarity(target, candidates[0], w, ctx);
    long long best_dist = calendar_distance(target.date, candidates[0].date);
    for (std::size_t j = 1; j < candidates.size(); ++j) {
        const double d = dissimilarity(target, candidates[j], w, ctx);
        if (d < best_d - kTieTolerance) {
            best = j;
            best_d = d;
            best_dist = calendar_distance(target.date, candidates[j].date);
            continue;
        }
        if (d > best_d + kTieTolerance) continue;
        const long long dist = calendar_distance(target.date, candidates[j].date);
        if (dist < best_dist || (dist == best_dist && candidates[j].date < candidates[best].date)) {
            best = j;
            best_d = std::min(best_d, d);
            best_dist = dist;
        }
    }
    return best;
}

ImputationResult copy_paste_and_scale(const EnergySeries& es, const PowerSeries& ps,
                                      std::span<const DayView> days, std::span<const Gap> gaps,
                                      std::span<const DayMatch> matches, bool scale) {
    std::vector<std::optional<std::size_t>> source_of(days.size());
    for (const auto& m : matches) {
        if (m.target_day >= days.size() || m.source_day >= days.size())
            throw ImputationError("match refers to a day outside the series");
        const DayView& src = days[m.source_day];
        if (!src.full || src.missing != 0)
            throw ImputationError("matched source day is not a full complete day");
        source_of[m.target_day] = m.source_day;
    }

    ImputationResult result;
    result.completed_power = ps;
    auto& out = result.completed_power.values;
    for (std::size_t d = 0; d < days.size(); ++d) {
        const DayView& day = days[d];
        if (day.missing == 0) continue;
        if (!source_of[d]) throw ImputationError("day with gaps has no matched day");
        const DayView& src = days[*source_of[d]];
        for (std::size_t pos = day.first_pos; pos < day.end_pos(); ++pos) {
            if (ps.values[pos]) continue;
            const std::size_t slot = day.first_slot + (pos - day.first_pos);
            out[pos] = ps.values[src.first_pos + slot];
        }
    }

    const double dt = step_hours(ps.resolution);
    for (const Gap& gap : gaps) {
        GapAudit audit;
        audit.gap = gap;
        audit.anchored = gap.anchored();
        for (const auto& share : gap_day_shares(days, gap)) {
            audit.matched_dates.push_back(days[*source_of[share.day]].date);
        }
        double pasted = 0.0;
        for (std::size_t pos = gap.first_pos(); pos <= gap.last_pos(); ++pos) pasted += *out[pos];
        pasted *= dt;
        audit.pasted_energy = pasted;

        if (scale && gap.anchored()) {
            const double actual = *gap.actual_energy;
            if ((pasted == 0.0 && actual != 0.0) || actual * pasted < 0.0) {
                const double uniform = actual / (static_cast<double>(gap.length()) * dt);
                for (std::size_t pos = gap.first_pos(); pos <= gap.last_pos(); ++pos) out[pos] = uniform;
                audit.uniform_fallback = true;
                audit.scale_factor = 0.0;
            } else if (pasted != 0.0) {
                audit.scale_factor = actual / pasted;
                for (std::size_t pos = gap.first_pos(); pos <= gap.last_pos(); ++pos)
                    *out[pos] *= audit.scale_factor;
            }
        }
        result.per_gap.push_back(std::move(audit));
    }

    result.completed_energy = fill_energy_from_power(es, result.completed_power);
    return result;
}

CpiPlan prepare_cpi(const EnergySeries& es) {
    CpiPlan plan;
    plan.energy = interpolate_singles(es);
    plan.power = energy_to_power(plan.energy);
    const std::size_t per_day = slots_per_day(es.resolution);
    plan.days = day_partition(plan.power);
    plan.gaps = detect_gaps(plan.energy);
    if (plan.gaps.empty()) return plan;

    std::vector<Gap> anchored;
    std::vector<bool> unanchored_day(plan.days.size(), false);
    bool multi_day = false;
    for (const Gap& g : plan.gaps) {
        const auto shares = gap_day_shares(plan.days, g);
        if (g.anchored()) {
            anchored.push_back(g);
            multi_day = multi_day || shares.size() > 1;
        } else {
            for (const auto& s : shares) unanchored_day[s.day] = true;
        }
    }

    if (multi_day) {
        std::vector<DailyTotal> complete;
        for (const DayView& d : plan.days) {
            if (d.full && d.missing == 0) complete.push_back({d.date, d.known_energy});
        }
        try {
            plan.pattern = fit_weekly_pattern(complete);
        } catch (const ImputationError&) {
            // Too few complete days for a weekly fit: allocate proportionally.
            plan.pattern.reset();
        }
    }

    const auto totals = estimate_daily_energy(plan.days, anchored, plan.pattern.value_or(WeeklyPattern{}),
                                              es.resolution);
    std::vector<std::optional<double>> estimates(plan.days.size());
    for (std::size_t d = 0; d < plan.days.size(); ++d) {
        if (plan.days[d].missing > 0 && !unanchored_day[d]) estimates[d] = totals[d];
    }

    plan.records = compile_day_records(plan.days, estimates, per_day);
    for (const auto& r : plan.records) {
        if (!r.complete) plan.targets.push_back(r);
        else if (r.full) plan.candidates.push_back(r);
    }
    plan.context = make_season_context(plan.records);
    return plan;
}

ImputationResult run_cpi(const CpiPlan& plan, const CpiConfig& config) {
    config.weights.validate();
    if (plan.targets.empty()) {
        return ImputationResult{plan.power, plan.energy, {}};
    }
    if (plan.candidates.empty()) throw ImputationError("no complete day available");
    const auto best = kernels::match_days(plan.targets, plan.candidates, config.weights, plan.context,
                                          config.execution);
    std::vector<DayMatch> matches(plan.targets.size());
    for (std::size_t i = 0; i < plan.targets.size(); ++i) {
        matches[i] = {plan.targets[i].day_index, plan.candidates[best[i]].day_index};
    }
    return copy_paste_and_scale(plan.energy, plan.power, plan.days, plan.gaps, matches, config.scale);
}

ImputationResult impute_cpi(const EnergySeries& es, const CpiConfig& config) {
    return run_cpi(prepare_cpi(es), config);
}

}  // namespace cpimpute
