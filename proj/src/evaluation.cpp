#include "cpimpute/evaluation.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cpimpute/baselines.hpp"
#include "cpimpute/csv.hpp"
#include "cpimpute/gap_synthesis.hpp"
#include "cpimpute/metrics.hpp"

namespace cpimpute {

namespace {

struct CellTruth {
    PowerSeries actual;
    std::vector<std::size_t> mask;
    std::vector<Gap> gaps;
    std::vector<double> gap_energies;
};

CellTruth describe_cell(const EnergySeries& truth, const EnergySeries& degraded) {
    CellTruth c;
    c.actual = energy_to_power(truth);
    c.mask = missing_positions(energy_to_power(degraded));
    for (const Gap& g : detect_gaps(degraded)) {
        if (!g.anchored()) continue;
        c.gaps.push_back(g);
        c.gap_energies.push_back(*g.actual_energy);
    }
    return c;
}

void score_into(MethodScore& s, const CellTruth& truth, const PowerSeries& completed) {
    const MapeResult mape = mape_p(truth.actual, completed, truth.mask);
    s.mape_p = mape.value;
    s.skipped_terms = mape.skipped_terms;
    std::vector<double> imputed;
    imputed.reserve(truth.gaps.size());
    for (const Gap& g : truth.gaps) imputed.push_back(gap_energy(completed, g));
    s.wape_e = wape_e(truth.gap_energies, imputed);
}

std::size_t max_gap_for(const std::optional<std::size_t>& configured, Resolution r) {
    return configured ? *configured : default_max_gap_len(r);
}

double mean_of(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::cpi: return "cpi";
        case Method::cpi_unscaled: return "cpi-unscaled";
        case Method::linear: return "linear";
        case Method::histavg: return "histavg";
        case Method::seasonal: return "seasonal";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::cpi, Method::cpi_unscaled, Method::linear, Method::histavg, Method::seasonal}) {
        if (method_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected cpi, cpi-unscaled, linear, histavg or seasonal)");
}

std::vector<Method> standard_methods() {
    return {Method::cpi, Method::linear, Method::histavg, Method::seasonal};
}

PowerSeries impute_power(Method m, const EnergySeries& degraded, const CpiConfig& cpi) {
    switch (m) {
        case Method::cpi:
        case Method::cpi_unscaled: {
            CpiConfig cfg = cpi;
            cfg.scale = m == Method::cpi;
            return impute_cpi(degraded, cfg).completed_power;
        }
        case Method::linear: return impute_linear(energy_to_power(degraded));
        case Method::histavg: return impute_hist_avg(energy_to_power(degraded));
        case Method::seasonal: return impute_seasonal_model(energy_to_power(degraded));
    }
    throw std::invalid_argument("unknown method");
}

const AggregateScore* EvaluationReport::aggregate(double share, Method m) const {
    for (const auto& a : aggregates) {
        if (a.method == m && std::abs(a.share - share) < 1e-12) return &a;
    }
    return nullptr;
}

std::vector<AggregateScore> aggregate_scores(std::span<const MethodScore> scores,
                                             std::span<const double> shares,
                                             std::span<const Method> methods) {
    std::vector<AggregateScore> out;
    for (double share : shares) {
        for (Method m : methods) {
            std::vector<double> mape, wape, runtime;
            for (const auto& s : scores) {
                if (s.method != m || std::abs(s.share - share) > 1e-12 || !s.ok()) continue;
                mape.push_back(*s.mape_p);
                wape.push_back(*s.wape_e);
                runtime.push_back(s.runtime_s);
            }
            AggregateScore a;
            a.share = share;
            a.method = m;
            a.count = mape.size();
            a.runtime_s_mean = mean_of(runtime);
            if (mape.size() >= 5) {
                a.trimmed = true;
                a.mape_p_trimmed = trimmed_mean(mape);
                a.wape_e_trimmed = trimmed_mean(wape);
            }
            out.push_back(a);
        }
    }
    return out;
}

EvaluationReport evaluate(std::span<const NamedSeries> series, const EvaluationConfig& config) {
    struct Cell {
        std::size_t series = 0;
        double share = 0.0;
        std::uint64_t seed = 0;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < series.size(); ++s) {
        for (double share : config.shares) {
            for (std::uint64_t seed : config.seeds) cells.push_back({s, share, seed});
        }
    }
    const std::size_t per_cell = config.methods.size();
    EvaluationReport report;
    report.scores.resize(cells.size() * per_cell);

    // Cells run in parallel; imputation inside a cell stays serial.
    CpiConfig cpi_cfg{config.weights, true, ExecutionPolicy::serial()};
    const auto ncells = static_cast<long long>(cells.size());
    const int nthreads = effective_threads(config.execution);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads) if (config.execution.parallel)
    for (long long c = 0; c < ncells; ++c) {
        const Cell& cell = cells[static_cast<std::size_t>(c)];
        const NamedSeries& ns = series[cell.series];
        MethodScore* row = &report.scores[static_cast<std::size_t>(c) * per_cell];
        for (std::size_t k = 0; k < per_cell; ++k) {
            row[k].series_id = ns.id;
            row[k].share = cell.share;
            row[k].seed = cell.seed;
            row[k].method = config.methods[k];
        }
        try {
            MissingnessSpec spec{cell.share, max_gap_for(config.max_gap_len, ns.series.resolution),
                                 config.single_fraction, cell.seed};
            const DegradedSeries degraded = insert_missing(ns.series, spec);
            const CellTruth truth = describe_cell(ns.series, degraded.series);
            for (std::size_t k = 0; k < per_cell; ++k) {
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const PowerSeries completed = impute_power(config.methods[k], degraded.series, cpi_cfg);
                    const auto t1 = std::chrono::steady_clock::now();
                    row[k].runtime_s = std::chrono::duration<double>(t1 - t0).count();
                    score_into(row[k], truth, completed);
                } catch (const std::exception& e) {
                    row[k].error = e.what();
                    row[k].mape_p.reset();
                    row[k].wape_e.reset();
                }
            }
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < per_cell; ++k) row[k].error = e.what();
        }
    }

    report.aggregates = aggregate_scores(report.scores, config.shares, config.methods);
    return report;
}

std::string report_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "series_id,share,seed,method,mape_p,wape_e,runtime_s,skipped_terms\n";
    for (const auto& s : report.scores) {
        os << s.series_id << ',' << format_number(s.share) << ',' << s.seed << ',' << method_name(s.method)
           << ',' << optional_number(s.mape_p) << ',' << optional_number(s.wape_e) << ','
           << format_number(s.runtime_s) << ',' << s.skipped_terms << '\n';
    }
    return os.str();
}

std::string aggregate_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "share,method,mape_p_trimmed,wape_e_trimmed,runtime_s_mean\n";
    for (const auto& a : report.aggregates) {
        os << format_number(a.share) << ',' << method_name(a.method) << ',' << optional_number(a.mape_p_trimmed)
           << ',' << optional_number(a.wape_e_trimmed) << ',' << format_number(a.runtime_s_mean) << '\n';
    }
    return os.str();
}

GridSearchResult grid_search_weights(std::span<const NamedSeries> calibration,
                                     const GridSearchConfig& config) {
    if (calibration.empty()) throw std::invalid_argument("calibration set is empty");
    for (const IntRange* r : {&config.energy, &config.weekday, &config.season}) {
        if (r->lo > r->hi || r->lo < 0) throw std::invalid_argument("invalid weight range");
    }

    struct Prepared {
        CpiPlan plan;
        CellTruth truth;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(calibration.size());
    for (const auto& ns : calibration) {
        MissingnessSpec spec{config.share, max_gap_for(config.max_gap_len, ns.series.resolution),
                             config.single_fraction, config.seed};
        const DegradedSeries degraded = insert_missing(ns.series, spec);
        prepared.push_back({prepare_cpi(degraded.series), describe_cell(ns.series, degraded.series)});
    }

    GridSearchResult result;
    for (int we = config.energy.lo; we <= config.energy.hi; ++we) {
        for (int ww = config.weekday.lo; ww <= config.weekday.hi; ++ww) {
            for (int ws = config.season.lo; ws <= config.season.hi; ++ws) {
                if (we + ww + ws == 0) continue;
                result.grid.push_back({{double(we), double(ww), double(ws)}, 0.0});
            }
        }
    }
    if (result.grid.empty()) throw std::invalid_argument("weight grid is empty");

    const auto npoints = static_cast<long long>(result.grid.size());
    const int nthreads = effective_threads(config.execution);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads) if (config.execution.parallel)
    for (long long p = 0; p < npoints; ++p) {
        GridPoint& point = result.grid[static_cast<std::size_t>(p)];
        std::vector<double> scores;
        try {
            const CpiConfig cfg{point.weights, true, ExecutionPolicy::serial()};
            for (const auto& prep : prepared) {
                const auto completed = run_cpi(prep.plan, cfg).completed_power;
                scores.push_back(mape_p(prep.truth.actual, completed, prep.truth.mask).value);
            }
            point.score = scores.size() >= 5 ? trimmed_mean(scores) : mean_of(scores);
        } catch (const std::exception&) {
            point.score = std::numeric_limits<double>::infinity();
        }
    }

    const auto better = [](const GridPoint& a, const GridPoint& b) {
        if (a.score != b.score) return a.score < b.score;
        const auto& x = a.weights;
        const auto& y = b.weights;
        const double sx = x.energy + x.weekday + x.season;
        const double sy = y.energy + y.weekday + y.season;
        if (sx != sy) return sx < sy;
        return std::tie(x.energy, x.weekday, x.season) < std::tie(y.energy, y.weekday, y.season);
    };
    const auto best = std::min_element(result.grid.begin(), result.grid.end(), better);
    if (!std::isfinite(best->score)) throw ImputationError("CPI failed at every grid point");
    result.best = best->weights;
    result.best_score = best->score;
    return result;
}

std::string grid_csv(const GridSearchResult& result) {
    std::ostringstream os;
    os << "w_e,w_w,w_s,mape_p\n";
    for (const auto& p : result.grid) {
        os << format_number(p.weights.energy) << ',' << format_number(p.weights.weekday) << ','
           << format_number(p.weights.season) << ',' << format_number(p.score) << '\n';
    }
    return os.str();
}

}  // namespace cpimpute
