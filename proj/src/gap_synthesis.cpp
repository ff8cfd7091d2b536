#include "cpimpute/gap_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cpimpute/csv.hpp"

namespace cpimpute {

namespace {

constexpr int kMaxAttempts = 5000;

bool range_free(const std::vector<std::uint8_t>& used, std::size_t lo, std::size_t hi) {
    return std::none_of(used.begin() + static_cast<std::ptrdiff_t>(lo),
                        used.begin() + static_cast<std::ptrdiff_t>(hi) + 1,
                        [](std::uint8_t u) { return u != 0; });
}

[[noreturn]] void infeasible(const std::string& what) {
    throw ImputationError("cannot place " + what +
                          " without touching other gaps; try a smaller share or max gap length");
}

}  // namespace

void MissingnessSpec::validate(std::size_t n) const {
    if (!(share > 0.0 && share < 1.0)) throw std::invalid_argument("share must lie in (0, 1)");
    if (max_gap_len < 2) throw std::invalid_argument("max gap length must be at least 2");
    if (!(single_fraction >= 0.0 && single_fraction <= 1.0))
        throw std::invalid_argument("single fraction must lie in [0, 1]");
    if (std::llround(share * static_cast<double>(n)) < 1)
        throw std::invalid_argument("share * series length rounds to zero removed readings");
}

std::size_t default_max_gap_len(Resolution resolution) {
    return 3 * slots_per_day(resolution);
}

DegradedSeries insert_missing(const EnergySeries& es, const MissingnessSpec& spec) {
    const std::size_t n = es.size();
    spec.validate(n);
    if (!es.complete()) throw std::invalid_argument("gap insertion needs a complete series");

    const auto total = static_cast<std::size_t>(std::llround(spec.share * static_cast<double>(n)));
    auto singles = static_cast<std::size_t>(std::llround(spec.single_fraction * static_cast<double>(total)));
    std::size_t rest = total - singles;

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> len_dist(2, spec.max_gap_len);
    std::vector<std::size_t> lengths;
    while (rest > 0) {
        std::size_t len = std::min(len_dist(rng), rest);
        if (len == 1) {
            // A remainder of one cannot form a run on its own.
            if (!lengths.empty() && lengths.back() < spec.max_gap_len) {
                ++lengths.back();
            } else if (!lengths.empty() && lengths.back() > 2) {
                --lengths.back();
                lengths.push_back(2);
            } else {
                ++singles;
            }
            break;
        }
        lengths.push_back(len);
        rest -= len;
    }
    std::stable_sort(lengths.begin(), lengths.end(), std::greater<>());

    // Runs occupy [start, start+len-1]; the readings either side must stay
    // free so runs never touch, and index 0 and n-1 are never removed.
    std::vector<std::uint8_t> used(n, 0);
    MissingMask mask;
    for (std::size_t len : lengths) {
        if (len + 2 > n) infeasible("a run of " + std::to_string(len));
        std::uniform_int_distribution<std::size_t> start_dist(1, n - 1 - len);
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const std::size_t start = start_dist(rng);
            if (!range_free(used, start - 1, start + len)) continue;
            std::fill(used.begin() + static_cast<std::ptrdiff_t>(start),
                      used.begin() + static_cast<std::ptrdiff_t>(start + len), std::uint8_t{1});
            placed = true;
        }
        if (!placed) infeasible("a run of " + std::to_string(len));
    }
    if (singles > 0) {
        if (n < 3) infeasible("a single missing value");
        std::uniform_int_distribution<std::size_t> pos_dist(1, n - 2);
        for (std::size_t s = 0; s < singles; ++s) {
            bool placed = false;
            for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
                const std::size_t pos = pos_dist(rng);
                if (!range_free(used, pos - 1, pos + 1)) continue;
                used[pos] = 2;
                placed = true;
            }
            if (!placed) infeasible("a single missing value");
        }
    }

    DegradedSeries out{es, {}};
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i] == 0) continue;
        out.series.values[i].reset();
        out.mask.indices.push_back(i);
        if (used[i] == 2) out.mask.singles.push_back(i);
    }
    return out;
}

std::string mask_to_csv(const MissingMask& mask, const EnergySeries& es) {
    std::ostringstream os;
    os << "index,timestamp,single\n";
    std::size_t s = 0;
    for (std::size_t idx : mask.indices) {
        while (s < mask.singles.size() && mask.singles[s] < idx) ++s;
        const bool single = s < mask.singles.size() && mask.singles[s] == idx;
        os << idx << ',' << format_timestamp(es.time_at(idx)) << ',' << (single ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace cpimpute
