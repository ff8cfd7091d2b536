#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "cpimpute/evaluation.hpp"
#include "cpimpute/gap_synthesis.hpp"
#include "cpimpute/metrics.hpp"
#include "support/synthetic.hpp"

using namespace cpimpute;
using namespace std::chrono;

namespace {

PowerSeries hourly(std::vector<Reading> v) {
    return PowerSeries{sys_days{2013y / January / 7}, hours{1}, std::move(v)};
}

/// Sort, drop two from each end, average.
double trimmed_oracle(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (std::size_t i = 2; i + 2 < v.size(); ++i) s += v[i];
    return s / static_cast<double>(v.size() - 4);
}

std::vector<NamedSeries> calibration_set(int count, int days) {
    std::vector<NamedSeries> out;
    for (int i = 0; i < count; ++i) {
        testing::SyntheticSpec spec;
        spec.days = days;
        spec.seed = static_cast<std::uint64_t>(100 + i);
        out.push_back({"s" + std::to_string(i), testing::synthetic_energy(spec)});
    }
    return out;
}

}  // namespace

TEST_CASE("mape_p averages relative errors over the mask") {
    const PowerSeries actual = hourly({2.0, 4.0, 1.0});
    const PowerSeries imputed = hourly({3.0, 3.0, 1.0});
    const std::vector<std::size_t> mask{0, 1};
    const MapeResult r = mape_p(actual, imputed, mask);
    CHECK(r.value == doctest::Approx(0.375));
    CHECK(r.evaluated_terms == 2);
    CHECK(r.skipped_terms == 0);
}

TEST_CASE("mape_p skips zero actual power and fails when nothing is left") {
    const PowerSeries actual = hourly({0.0, 4.0});
    const PowerSeries imputed = hourly({1.0, 5.0});
    const std::vector<std::size_t> both{0, 1};
    const MapeResult r = mape_p(actual, imputed, both);
    CHECK(r.value == doctest::Approx(0.25));
    CHECK(r.skipped_terms == 1);
    const std::vector<std::size_t> zero_only{0};
    CHECK_THROWS_WITH_AS(mape_p(actual, imputed, zero_only), "no evaluable points", MetricError);
    CHECK_THROWS_AS(mape_p(actual, hourly({1.0}), both), MetricError);
}

TEST_CASE("wape_e weights gap energy errors by total energy") {
    const std::vector<double> actual{10.0, 20.0};
    const std::vector<double> imputed{9.0, 22.0};
    CHECK(wape_e(actual, imputed) == doctest::Approx(0.1));
    CHECK(wape_e(actual, actual) == 0.0);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(wape_e(zeros, imputed), MetricError);
    CHECK_THROWS_AS(wape_e(std::vector<double>{}, std::vector<double>{}), MetricError);
}

TEST_CASE("trimmed mean drops the two extremes on each side") {
    std::vector<double> v(10);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(trimmed_mean(v) == doctest::Approx(5.5));
    CHECK(trimmed_mean(std::vector<double>{1, 2, 3, 4, 100}) == doctest::Approx(3.0));
    CHECK_THROWS_AS(trimmed_mean(std::vector<double>{1, 2, 3, 4}), MetricError);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> len(5, 60);
    std::lognormal_distribution<double> value(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> xs(len(rng));
        for (double& x : xs) x = value(rng);
        const double expected = trimmed_oracle(xs);
        CHECK(trimmed_mean(xs) == doctest::Approx(expected).epsilon(1e-12));
        std::shuffle(xs.begin(), xs.end(), rng);
        CHECK(trimmed_mean(xs) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gap_energy integrates power over a gap") {
    const PowerSeries ps = hourly({1.0, 2.0, 3.0, 4.0});
    Gap g;
    g.first_step = 2;
    g.last_step = 3;
    CHECK(gap_energy(ps, g) == doctest::Approx(5.0));
    CHECK(missing_positions(hourly({1.0, std::nullopt, 2.0, std::nullopt})) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::cpi, Method::cpi_unscaled, Method::linear, Method::histavg, Method::seasonal}) {
        CHECK(parse_method(method_name(m)) == m);
    }
    CHECK_THROWS_AS(parse_method("spline"), std::invalid_argument);
    CHECK(standard_methods().size() == 4);
}

TEST_CASE("evaluate produces one row per series, share, seed and method") {
    const auto series = calibration_set(2, 42);
    EvaluationConfig cfg;
    cfg.shares = {0.05, 0.10};
    cfg.seeds = {1, 2};
    const EvaluationReport report = evaluate(series, cfg);
    CHECK(report.scores.size() == 2 * 2 * 2 * 4);
    for (const auto& s : report.scores) {
        CHECK_MESSAGE(s.ok(), s.error);
        CHECK(s.mape_p.has_value());
        CHECK(*s.wape_e >= 0.0);
    }
    // Two series and two seeds give four values per cell: too few to trim.
    REQUIRE(report.aggregates.size() == 2 * 4);
    for (const auto& a : report.aggregates) {
        CHECK(a.count == 4);
        CHECK_FALSE(a.trimmed);
        CHECK_FALSE(a.mape_p_trimmed);
    }
    const std::string csv = report_csv(report);
    CHECK(csv.rfind("series_id,share,seed,method,mape_p,wape_e,runtime_s,skipped_terms\n", 0) == 0);
    CHECK(aggregate_csv(report).rfind("share,method,mape_p_trimmed,wape_e_trimmed,runtime_s_mean\n", 0) == 0);
}

TEST_CASE("energy-preserving CPI has no gap energy error") {
    const auto series = calibration_set(1, 42);
    EvaluationConfig cfg;
    cfg.shares = {0.10};
    cfg.methods = {Method::cpi, Method::cpi_unscaled};
    const EvaluationReport report = evaluate(series, cfg);
    REQUIRE(report.scores.size() == 2);
    CHECK(*report.scores[0].wape_e < 1e-9);
    CHECK(*report.scores[1].wape_e > 1e-6);
}

TEST_CASE("aggregates trim once five values are present") {
    std::vector<MethodScore> scores;
    for (int i = 0; i < 6; ++i) {
        MethodScore s;
        s.share = 0.1;
        s.method = Method::linear;
        s.mape_p = static_cast<double>(i);
        s.wape_e = 1.0;
        scores.push_back(s);
    }
    scores.back().error = "failed";
    const std::vector<double> shares{0.1};
    const std::vector<Method> methods{Method::linear};
    const auto agg = aggregate_scores(scores, shares, methods);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].count == 5);
    CHECK(agg[0].trimmed);
    CHECK(*agg[0].mape_p_trimmed == doctest::Approx(2.0));
}

TEST_CASE("evaluate records failures instead of aborting") {
    std::vector<NamedSeries> series = calibration_set(1, 10);
    EvaluationConfig cfg;
    cfg.shares = {0.10};
    cfg.methods = {Method::seasonal, Method::linear};
    const EvaluationReport report = evaluate(series, cfg);
    REQUIRE(report.scores.size() == 2);
    CHECK_FALSE(report.scores[0].ok());  // ten days are too short for the seasonal model
    CHECK_FALSE(report.scores[0].mape_p);
    CHECK(report.scores[1].ok());
    CHECK(report_csv(report).find("seasonal,,,") != std::string::npos);
}

TEST_CASE("serial and parallel evaluation agree") {
    const auto series = calibration_set(3, 35);
    EvaluationConfig cfg;
    cfg.shares = {0.05, 0.2};
    cfg.seeds = {4};
    cfg.execution = ExecutionPolicy::serial();
    const EvaluationReport a = evaluate(series, cfg);
    cfg.execution = {true, 3};
    const EvaluationReport b = evaluate(series, cfg);
    REQUIRE(a.scores.size() == b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        CHECK(a.scores[i].series_id == b.scores[i].series_id);
        CHECK(a.scores[i].mape_p == b.scores[i].mape_p);
        CHECK(a.scores[i].wape_e == b.scores[i].wape_e);
    }
}

TEST_CASE("grid search scores agree with direct imputation") {
    const auto series = calibration_set(2, 42);
    GridSearchConfig cfg;
    cfg.energy = {2, 3};
    cfg.weekday = {0, 1};
    cfg.season = {4, 4};
    cfg.share = 0.1;
    cfg.seed = 9;
    const GridSearchResult r = grid_search_weights(series, cfg);
    REQUIRE(r.grid.size() == 4);

    for (const GridPoint& p : r.grid) {
        double sum = 0.0;
        for (const auto& ns : series) {
            const auto d = insert_missing(ns.series, {0.1, 288, 0.05, 9});
            CpiConfig c;
            c.weights = p.weights;
            const PowerSeries completed = impute_cpi(d.series, c).completed_power;
            const auto mask = missing_positions(energy_to_power(d.series));
            sum += mape_p(energy_to_power(ns.series), completed, mask).value;
        }
        CHECK(p.score == doctest::Approx(sum / 2.0).epsilon(1e-12));
    }

    // The reported optimum is the minimum, ties broken by smaller weight sum.
    for (const GridPoint& p : r.grid) {
        CHECK(r.best_score <= p.score);
        if (p.score == r.best_score) {
            const double s = p.weights.energy + p.weights.weekday + p.weights.season;
            CHECK(r.best.energy + r.best.weekday + r.best.season <= s);
        }
    }
    CHECK(grid_csv(r).rfind("w_e,w_w,w_s,mape_p\n", 0) == 0);
}

TEST_CASE("grid search with a single point and invalid ranges") {
    const auto series = calibration_set(1, 30);
    GridSearchConfig cfg;
    cfg.energy = {5, 5};
    cfg.weekday = {1, 1};
    cfg.season = {10, 10};
    const GridSearchResult r = grid_search_weights(series, cfg);
    CHECK(r.grid.size() == 1);
    CHECK(r.best == DissimilarityWeights{5.0, 1.0, 10.0});

    cfg.energy = {3, 2};
    CHECK_THROWS_AS(grid_search_weights(series, cfg), std::invalid_argument);
    cfg.energy = {0, 0};
    cfg.weekday = {0, 0};
    cfg.season = {0, 0};
    CHECK_THROWS_AS(grid_search_weights(series, cfg), std::invalid_argument);
    CHECK_THROWS_AS(grid_search_weights({}, GridSearchConfig{}), std::invalid_argument);
}

TEST_CASE("trimmed mean edge cases and bounds") {
    CHECK(trimmed_mean(std::vector<double>(7, 4.25)) == 4.25);
    CHECK(trimmed_mean(std::vector<double>{9, 1, 5, 7, 3}) == 5.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs(12);
        for (double& x : xs) x = value(rng);
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        const double t = trimmed_mean(xs);
        CHECK(t >= sorted[2] - 1e-12);
        CHECK(t <= sorted[9] + 1e-12);
    }
}

TEST_CASE("perfect imputation scores zero") {
    const PowerSeries actual = hourly({2.0, 4.0, 1.0});
    const std::vector<std::size_t> mask{0, 1, 2};
    CHECK(mape_p(actual, actual, mask).value == 0.0);
}

TEST_CASE("report sizes follow the experimental grid") {
    const auto series = calibration_set(1, 30);
    EvaluationConfig cfg;
    const EvaluationReport full = evaluate(series, cfg);
    CHECK(full.scores.size() == 6 * 4);
    CHECK(full.aggregates.size() == 6 * 4);

    cfg.shares = {0.1};
    cfg.methods = {Method::cpi};
    const EvaluationReport single = evaluate(series, cfg);
    REQUIRE(single.scores.size() == 1);
    REQUIRE(single.aggregates.size() == 1);
    CHECK_FALSE(single.aggregates[0].trimmed);
    CHECK(single.aggregates[0].count == 1);

    // Identical inputs give identical scores.
    const EvaluationReport again = evaluate(series, cfg);
    CHECK(again.scores[0].mape_p == single.scores[0].mape_p);
}

TEST_CASE("grid search prefers the season weight when the daily shape drifts through the year") {
    // Every day has the same energy and the same shape up to a phase that
    // drifts by a full cycle every 30 days, so the nearest days are the best
    // donors whatever their weekday.
    std::vector<NamedSeries> series;
    for (int k = 0; k < 2; ++k) {
        PowerSeries ps{sys_days{2013y / January / 1}, minutes{15}, {}};
        for (int d = 0; d < 120; ++d) {
            for (int s = 0; s < 96; ++s) {
                const double phase = 2.0 * std::numbers::pi * (s / 96.0 + (d + 7 * k) / 30.0);
                ps.values.emplace_back(1.0 + 0.5 * std::sin(phase));
            }
        }
        series.push_back({"drift" + std::to_string(k), power_to_energy(ps, 0.0)});
    }
    GridSearchConfig cfg;
    cfg.energy = {1, 1};
    cfg.weekday = {0, 5};
    cfg.season = {1, 5};
    cfg.max_gap_len = 96;
    const GridSearchResult r = grid_search_weights(series, cfg);
    CHECK(r.best.season > r.best.weekday);
    double weekday_heavy = 0.0;
    for (const auto& p : r.grid) {
        if (p.weights.weekday == 5.0 && p.weights.season == 1.0) weekday_heavy = p.score;
    }
    CHECK(r.best_score < weekday_heavy);
}
