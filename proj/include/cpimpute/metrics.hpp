#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "cpimpute/series.hpp"

namespace cpimpute {

/// Actual power values below this magnitude (kW) are left out of MAPE.
inline constexpr double kZeroPowerThreshold = 1e-9;

class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MapeResult {
    double value = 0.0;
    std::size_t skipped_terms = 0;
    std::size_t evaluated_terms = 0;
};

/// Mean absolute percentage error over the power positions in `mask`.
MapeResult mape_p(const PowerSeries& actual, const PowerSeries& imputed,
                  std::span<const std::size_t> mask);

/// Weighted absolute percentage error of gap energies:
/// sum |imputed - actual| / |sum actual|.
double wape_e(std::span<const double> actual, std::span<const double> imputed);

/// Mean after dropping the two largest and two smallest values.
double trimmed_mean(std::span<const double> values);

/// PowerSeries positions that are missing.
std::vector<std::size_t> missing_positions(const PowerSeries& ps);

/// resolution * sum of `ps` over the gap.
double gap_energy(const PowerSeries& ps, const Gap& gap);

}  // namespace cpimpute
