#include "cpimpute/baselines.hpp"

#include <Eigen/Dense>

#include <numeric>
#include <string>

namespace cpimpute {

namespace {

void require_some_value(const PowerSeries& ps) {
    if (ps.missing_count() == ps.size()) throw ImputationError("power series has no known value");
}

double days_since_start(const PowerSeries& ps, std::size_t pos) {
    return static_cast<double>(pos) * static_cast<double>(ps.resolution.count()) / 86400.0;
}

}  // namespace

PowerSeries impute_linear(const PowerSeries& ps) {
    require_some_value(ps);
    PowerSeries out = ps;
    const std::size_t n = ps.size();
    std::optional<std::size_t> last_known;
    for (std::size_t i = 0; i < n; ++i) {
        if (!ps.values[i]) continue;
        const double right = *ps.values[i];
        if (!last_known) {
            for (std::size_t j = 0; j < i; ++j) out.values[j] = right;
        } else if (i > *last_known + 1) {
            const std::size_t t1 = *last_known;
            const double left = *ps.values[t1];
            const auto span = static_cast<double>(i - t1);
            for (std::size_t t = t1 + 1; t < i; ++t) {
                out.values[t] = static_cast<double>(t - t1) / span * (right - left) + left;
            }
        }
        last_known = i;
    }
    for (std::size_t j = *last_known + 1; j < n; ++j) out.values[j] = *ps.values[*last_known];
    return out;
}

PowerSeries impute_hist_avg(const PowerSeries& ps) {
    require_some_value(ps);
    const std::size_t week = 7 * slots_per_day(ps.resolution);
    std::vector<double> sum(week, 0.0);
    std::vector<std::size_t> count(week, 0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) continue;
        sum[i % week] += *ps.values[i];
        ++count[i % week];
    }
    PowerSeries out = ps;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps.values[i]) continue;
        const std::size_t slot = i % week;
        if (count[slot] == 0) {
            throw ImputationError("weekly slot " + std::to_string(slot) + " has no known value");
        }
        out.values[i] = sum[slot] / static_cast<double>(count[slot]);
    }
    return out;
}

double SeasonalModel::trend(double t_days) const {
    double g = trend_coef[0] + trend_coef[1] * t_days;
    for (std::size_t k = 0; k < knots.size(); ++k) {
        if (t_days > knots[k]) g += trend_coef[k + 2] * (t_days - knots[k]);
    }
    return g;
}

double SeasonalModel::value(const PowerSeries& grid, std::size_t pos) const {
    const Timestamp t = grid.interval_start(pos);
    return trend(days_since_start(grid, pos)) + daily[slot_of_day(t, grid.resolution)] +
           weekly[static_cast<std::size_t>(iso_weekday(date_of(t)) - 1)];
}

SeasonalModel fit_seasonal_model(const PowerSeries& ps, double knot_spacing_days) {
    const std::size_t per_day = slots_per_day(ps.resolution);
    const std::size_t known = ps.size() - ps.missing_count();
    if (known < 14 * per_day) {
        throw ImputationError("seasonal model needs at least two weeks of known values, got " +
                              std::to_string(known) + " values");
    }

    SeasonalModel m;
    m.knot_spacing_days = knot_spacing_days;
    const double span = days_since_start(ps, ps.size() - 1);
    for (double k = knot_spacing_days; k < span; k += knot_spacing_days) m.knots.push_back(k);

    const auto cols = static_cast<Eigen::Index>(2 + m.knots.size());
    Eigen::MatrixXd design(static_cast<Eigen::Index>(known), cols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(known));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) continue;
        const double t = days_since_start(ps, i);
        design(row, 0) = 1.0;
        design(row, 1) = t;
        for (std::size_t k = 0; k < m.knots.size(); ++k) {
            design(row, static_cast<Eigen::Index>(k + 2)) = t > m.knots[k] ? t - m.knots[k] : 0.0;
        }
        target(row) = *ps.values[i];
        ++row;
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
    m.trend_coef.assign(coef.data(), coef.data() + coef.size());

    // Daily profile from detrended values.
    std::vector<double> sum(per_day, 0.0);
    std::vector<std::size_t> count(per_day, 0);
    std::vector<double> detrended(ps.size(), 0.0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) continue;
        detrended[i] = *ps.values[i] - m.trend(days_since_start(ps, i));
        const std::size_t slot = slot_of_day(ps.interval_start(i), ps.resolution);
        sum[slot] += detrended[i];
        ++count[slot];
    }
    m.daily.assign(per_day, 0.0);
    for (std::size_t s = 0; s < per_day; ++s) {
        if (count[s] > 0) m.daily[s] = sum[s] / static_cast<double>(count[s]);
    }
    const double daily_mean = std::accumulate(m.daily.begin(), m.daily.end(), 0.0) / static_cast<double>(per_day);
    for (double& d : m.daily) d -= daily_mean;

    // Weekly profile from what the trend and daily profile leave.
    std::array<double, 7> wsum{};
    std::array<std::size_t, 7> wcount{};
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) continue;
        const Timestamp t = ps.interval_start(i);
        const auto w = static_cast<std::size_t>(iso_weekday(date_of(t)) - 1);
        wsum[w] += detrended[i] - m.daily[slot_of_day(t, ps.resolution)];
        ++wcount[w];
    }
    double wmean = 0.0;
    for (std::size_t w = 0; w < 7; ++w) {
        m.weekly[w] = wcount[w] > 0 ? wsum[w] / static_cast<double>(wcount[w]) : 0.0;
        wmean += m.weekly[w];
    }
    wmean /= 7.0;
    for (double& w : m.weekly) w -= wmean;
    return m;
}

PowerSeries impute_seasonal_model(const PowerSeries& ps) {
    const SeasonalModel model = fit_seasonal_model(ps);
    PowerSeries out = ps;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) out.values[i] = model.value(ps, i);
    }
    return out;
}

}  // namespace cpimpute
