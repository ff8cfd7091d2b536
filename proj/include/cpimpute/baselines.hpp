#pragma once

#include <array>
#include <vector>

#include "cpimpute/series.hpp"

namespace cpimpute {

/// Linear interpolation between the known values bracketing each gap.
/// Leading and trailing runs repeat the nearest known value.
PowerSeries impute_linear(const PowerSeries& ps);

/// Fills each missing value with the mean of all known values at the same
/// position within the week (position modulo 7 days of slots).
PowerSeries impute_hist_avg(const PowerSeries& ps);

/// Additive trend + daily + weekly decomposition fitted on known values.
struct SeasonalModel {
    double knot_spacing_days = 28.0;
    std::vector<double> knots;         ///< days since series start
    std::vector<double> trend_coef;    ///< intercept, slope, one hinge per knot
    std::vector<double> daily;         ///< per within-day slot, zero mean
    std::array<double, 7> weekly{};    ///< per ISO weekday (index 0 = Monday), zero mean

    double trend(double t_days) const;
    double value(const PowerSeries& grid, std::size_t pos) const;
};

/// Least-squares piecewise-linear trend (knots every `knot_spacing_days`),
/// then per-slot means of the detrended values, then per-weekday means of
/// what remains. Needs at least two weeks worth of known values.
SeasonalModel fit_seasonal_model(const PowerSeries& ps, double knot_spacing_days = 28.0);

PowerSeries impute_seasonal_model(const PowerSeries& ps);

}  // namespace cpimpute
