#include "cpimpute/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace cpimpute {

MapeResult mape_p(const PowerSeries& actual, const PowerSeries& imputed,
                  std::span<const std::size_t> mask) {
    if (actual.size() != imputed.size()) throw MetricError("actual and imputed series differ in length");
    MapeResult r;
    double sum = 0.0;
    for (std::size_t pos : mask) {
        if (pos >= actual.size()) throw MetricError("mask position out of range");
        const auto& a = actual.values[pos];
        const auto& p = imputed.values[pos];
        if (!a || !p) throw MetricError("series incomplete at position " + std::to_string(pos));
        if (std::abs(*a) < kZeroPowerThreshold) {
            ++r.skipped_terms;
            continue;
        }
        sum += std::abs((*p - *a) / *a);
        ++r.evaluated_terms;
    }
    if (r.evaluated_terms == 0) throw MetricError("no evaluable points");
    r.value = sum / static_cast<double>(r.evaluated_terms);
    return r;
}

double wape_e(std::span<const double> actual, std::span<const double> imputed) {
    if (actual.size() != imputed.size()) throw MetricError("gap energy lists differ in length");
    if (actual.empty()) throw MetricError("no gaps to evaluate");
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        err += std::abs(imputed[i] - actual[i]);
        total += actual[i];
    }
    if (total == 0.0) throw MetricError("total actual gap energy is zero");
    return err / std::abs(total);
}

double trimmed_mean(std::span<const double> values) {
    if (values.size() < 5) throw MetricError("trimmed mean needs at least 5 values");
    // Partition the two smallest to the front and the two largest to the back.
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + 1, v.end());
    std::nth_element(v.begin() + 2, v.end() - 2, v.end());
    return std::accumulate(v.begin() + 2, v.end() - 2, 0.0) / static_cast<double>(v.size() - 4);
}

std::vector<std::size_t> missing_positions(const PowerSeries& ps) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps.values[i]) out.push_back(i);
    }
    return out;
}

double gap_energy(const PowerSeries& ps, const Gap& gap) {
    double sum = 0.0;
    for (std::size_t pos = gap.first_pos(); pos <= gap.last_pos(); ++pos) sum += ps.values[pos].value();
    return sum * step_hours(ps.resolution);
}

}  // namespace cpimpute
