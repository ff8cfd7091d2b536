#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpimpute/series.hpp"

namespace cpimpute {

struct MissingnessSpec {
    double share = 0.1;             ///< fraction of readings to remove, in (0, 1)
    std::size_t max_gap_len = 288;  ///< readings; at least 2
    double single_fraction = 0.05;  ///< fraction of removed readings that are isolated
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument when the settings are malformed for a series
    /// of `n` readings.
    void validate(std::size_t n) const;
};

struct MissingMask {
    std::vector<std::size_t> indices;  ///< removed energy readings, sorted
    std::vector<std::size_t> singles;  ///< isolated removals, sorted subset of indices
};

struct DegradedSeries {
    EnergySeries series;
    MissingMask mask;
};

/// Removes round(share * n) readings from a complete series: isolated
/// singles first by count, the rest as runs with lengths uniform in
/// [2, max_gap_len]. Runs never touch each other or the first/last reading.
/// Deterministic for a fixed seed.
DegradedSeries insert_missing(const EnergySeries& es, const MissingnessSpec& spec);

/// Default run length cap: three days of readings.
std::size_t default_max_gap_len(Resolution resolution);

/// `index,timestamp,single` rows, one per removed reading.
std::string mask_to_csv(const MissingMask& mask, const EnergySeries& es);

}  // namespace cpimpute
