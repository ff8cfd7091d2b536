#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpimpute/cpi.hpp"
#include "cpimpute/execution.hpp"
#include "cpimpute/series.hpp"

namespace cpimpute {

enum class Method { cpi, cpi_unscaled, linear, histavg, seasonal };

std::string_view method_name(Method m);
/// Accepts cpi, cpi-unscaled, linear, histavg, seasonal.
Method parse_method(std::string_view name);
/// The four methods of the standard comparison.
std::vector<Method> standard_methods();

/// Imputes `degraded` with `m` and returns the completed power series.
PowerSeries impute_power(Method m, const EnergySeries& degraded, const CpiConfig& cpi = {});

struct NamedSeries {
    std::string id;
    EnergySeries series;
};

struct MethodScore {
    std::string series_id;
    double share = 0.0;
    std::uint64_t seed = 0;
    Method method = Method::cpi;
    std::optional<double> mape_p;
    std::optional<double> wape_e;
    double runtime_s = 0.0;
    std::size_t skipped_terms = 0;
    std::string error;  ///< non-empty when the cell failed

    bool ok() const { return error.empty(); }
};

struct AggregateScore {
    double share = 0.0;
    Method method = Method::cpi;
    std::optional<double> mape_p_trimmed;  ///< absent when fewer than 5 values
    std::optional<double> wape_e_trimmed;
    double runtime_s_mean = 0.0;
    std::size_t count = 0;
    bool trimmed = false;
};

struct EvaluationReport {
    std::vector<MethodScore> scores;
    std::vector<AggregateScore> aggregates;

    const AggregateScore* aggregate(double share, Method m) const;
};

struct EvaluationConfig {
    std::vector<double> shares{0.01, 0.02, 0.05, 0.10, 0.20, 0.30};
    std::vector<Method> methods = standard_methods();
    std::vector<std::uint64_t> seeds{1};
    std::optional<std::size_t> max_gap_len;  ///< default: three days of readings
    double single_fraction = 0.05;
    DissimilarityWeights weights{};
    ExecutionPolicy execution{};
};

/// Degrades every (series, share, seed) cell, imputes it with each method and
/// scores the result. Failures are recorded per cell. Cells run in parallel
/// under a parallel policy; the report is identical either way apart from
/// runtimes.
EvaluationReport evaluate(std::span<const NamedSeries> series, const EvaluationConfig& config);

/// Per (share, method) trimmed means over all successful scores.
std::vector<AggregateScore> aggregate_scores(std::span<const MethodScore> scores,
                                             std::span<const double> shares,
                                             std::span<const Method> methods);

std::string report_csv(const EvaluationReport& report);
std::string aggregate_csv(const EvaluationReport& report);

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct GridSearchConfig {
    IntRange energy{1, 20};
    IntRange weekday{0, 10};
    IntRange season{1, 20};
    double share = 0.10;
    std::uint64_t seed = 1;
    std::optional<std::size_t> max_gap_len;
    double single_fraction = 0.05;
    ExecutionPolicy execution{};
};

struct GridPoint {
    DissimilarityWeights weights;
    double score = 0.0;  ///< +inf when CPI failed on some series
};

struct GridSearchResult {
    DissimilarityWeights best;
    double best_score = 0.0;
    std::vector<GridPoint> grid;
};

/// Exhaustive integer grid over the weight ranges, scoring each point by the
/// trimmed-mean MAPE_p over the calibration set (plain mean below five
/// series). Ties go to the smaller weight sum, then lexicographic order.
GridSearchResult grid_search_weights(std::span<const NamedSeries> calibration,
                                     const GridSearchConfig& config);

std::string grid_csv(const GridSearchResult& result);

}  // namespace cpimpute
