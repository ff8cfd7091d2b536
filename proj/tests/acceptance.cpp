// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cpimpute/cpi.hpp"
#include "cpimpute/csv.hpp"
#include "cpimpute/evaluation.hpp"
#include "cpimpute/gap_synthesis.hpp"
#include "cpimpute/metrics.hpp"
#include "support/synthetic.hpp"

#ifndef CPIMPUTE_DEFAULT_UCI_DIR
#define CPIMPUTE_DEFAULT_UCI_DIR ""
#endif

using namespace cpimpute;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<double> kShares{0.01, 0.02, 0.05, 0.10, 0.20, 0.30};

enum class Verdict { pass, fail, skip };

struct Outcome {
    Verdict verdict = Verdict::pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::fail) ++failures;
    std::cout << "criterion " << id << " [" << tag << "] " << title;
    if (!o.detail.empty()) std::cout << " -- " << o.detail;
    std::cout << std::endl;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<NamedSeries> synthetic_suite() {
    std::vector<NamedSeries> out;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        testing::SyntheticSpec spec;
        spec.seed = seed;
        std::ostringstream id;
        id << "syn" << (seed < 10 ? "0" : "") << seed;
        out.push_back({id.str(), testing::synthetic_energy(spec)});
    }
    return out;
}

MissingnessSpec missingness(double share, std::uint64_t seed) {
    return {share, default_max_gap_len(std::chrono::minutes{15}), 0.05, seed};
}

// Criteria 1 and 6 share one pass over every (series, share) cell.
struct ConservationRun {
    double worst_wape = 0.0;
    double seconds = 0.0;
    std::size_t cells = 0;
    std::size_t destructive = 0;
    std::size_t not_idempotent = 0;
    std::string error;
};

ConservationRun run_conservation(const std::vector<NamedSeries>& suite) {
    ConservationRun r;
    const auto t0 = Clock::now();
    double check_seconds = 0.0;
    for (const auto& ns : suite) {
        for (double share : kShares) {
            try {
                const DegradedSeries d = insert_missing(ns.series, missingness(share, 1));
                const ImputationResult res = impute_cpi(d.series);
                ++r.cells;
                std::vector<double> actual, imputed;
                for (const GapAudit& a : res.per_gap) {
                    if (!a.anchored) continue;
                    actual.push_back(*a.gap.actual_energy);
                    imputed.push_back(gap_energy(res.completed_power, a.gap));
                }
                r.worst_wape = std::max(r.worst_wape, wape_e(actual, imputed));

                const auto c0 = Clock::now();
                for (std::size_t i = 0; i < d.series.size(); ++i) {
                    if (d.series.values[i] && res.completed_energy.values[i] != d.series.values[i]) {
                        ++r.destructive;
                        break;
                    }
                }
                const ImputationResult again = impute_cpi(res.completed_energy);
                if (again.completed_energy.values != res.completed_energy.values ||
                    again.completed_power.values != energy_to_power(res.completed_energy).values) {
                    ++r.not_idempotent;
                }
                check_seconds += seconds_since(c0);
            } catch (const std::exception& e) {
                r.error = ns.id + ": " + e.what();
                return r;
            }
        }
    }
    r.seconds = seconds_since(t0) - check_seconds;
    return r;
}

Outcome criterion1(const ConservationRun& r) {
    std::ostringstream os;
    if (!r.error.empty()) return {Verdict::fail, r.error};
    os << r.cells << " cells, worst WAPE_E " << r.worst_wape << ", " << r.seconds << " s";
    const bool ok = r.cells == 120 && r.worst_wape <= 1e-9 && r.seconds < 120.0;
    return {ok ? Verdict::pass : Verdict::fail, os.str()};
}

Outcome ordering(const EvaluationReport& report, const std::vector<double>& shares) {
    std::ostringstream os;
    bool ok = true;
    for (double share : shares) {
        const auto* cpi = report.aggregate(share, Method::cpi);
        const auto* hist = report.aggregate(share, Method::histavg);
        const auto* lin = report.aggregate(share, Method::linear);
        const auto* raw = report.aggregate(share, Method::cpi_unscaled);
        if (!cpi || !hist || !lin || !raw || !cpi->mape_p_trimmed || !hist->mape_p_trimmed ||
            !lin->mape_p_trimmed || !raw->wape_e_trimmed || !lin->wape_e_trimmed) {
            os << share * 100 << "%: missing aggregates; ";
            ok = false;
            continue;
        }
        const bool mape_ok = *cpi->mape_p_trimmed < *hist->mape_p_trimmed &&
                             *hist->mape_p_trimmed < *lin->mape_p_trimmed;
        const bool wape_ok = *raw->wape_e_trimmed < *lin->wape_e_trimmed;
        ok = ok && mape_ok && wape_ok;
        os << share * 100 << "%: MAPE_p cpi " << *cpi->mape_p_trimmed << " histavg " << *hist->mape_p_trimmed
           << " linear " << *lin->mape_p_trimmed << ", WAPE_E cpi-unscaled " << *raw->wape_e_trimmed
           << " linear " << *lin->wape_e_trimmed << (mape_ok && wape_ok ? "" : " (violated)") << "; ";
    }
    return {ok ? Verdict::pass : Verdict::fail, os.str()};
}

Outcome criterion3() {
    std::ostringstream os;
    bool ok = true;
    const int table[7][7] = {
        {0, 1, 1, 1, 1, 2, 2}, {1, 0, 1, 1, 1, 2, 2}, {1, 1, 0, 1, 1, 2, 2}, {1, 1, 1, 0, 1, 2, 2},
        {1, 1, 1, 1, 0, 2, 2}, {2, 2, 2, 2, 2, 0, 1}, {2, 2, 2, 2, 2, 1, 0},
    };
    for (int a = 1; a <= 7; ++a) {
        for (int b = 1; b <= 7; ++b) {
            if (weekday_distance(a, b) != 0.5 * table[a - 1][b - 1]) {
                ok = false;
                os << "D_w(" << a << "," << b << ") wrong; ";
            }
        }
    }
    const double ds1 = season_distance(1, 365, 365);
    const double ds2 = season_distance(1, 182, 365);
    const double d = weighted_dissimilarity({5.0, 1.0, 10.0}, 0.2, 0.5, 0.1);
    ok = ok && std::abs(ds1 - 1.0 / 182.0) <= 1e-12 && std::abs(ds2 - 181.0 / 182.0) <= 1e-12 &&
         std::abs(d - 2.5) <= 1e-12;
    os << "D_s(1,365)=" << ds1 << " D_s(1,182)=" << ds2 << " D=" << d;
    return {ok ? Verdict::pass : Verdict::fail, os.str()};
}

Outcome criterion4() {
    std::mt19937_64 rng(2024);
    std::size_t trimmed_bad = 0;
    std::uniform_int_distribution<std::size_t> len(5, 200);
    std::normal_distribution<double> value(0.0, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> xs(len(rng));
        for (double& x : xs) x = value(rng);
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        double s = 0.0;
        for (std::size_t i = 2; i + 2 < sorted.size(); ++i) s += sorted[i];
        const double oracle = s / static_cast<double>(sorted.size() - 4);
        if (std::abs(trimmed_mean(xs) - oracle) > 1e-9 * std::max(1.0, std::abs(oracle))) ++trimmed_bad;
    }

    std::size_t roundtrip_bad = 0;
    std::uniform_real_distribution<double> step(0.0, 2.5);
    for (int trial = 0; trial < 100; ++trial) {
        EnergySeries es{std::chrono::sys_days{std::chrono::year{2013} / 1 / 1}, std::chrono::minutes{15}, {},
                        MeterKind::consumption};
        double e = std::uniform_real_distribution<double>(0.0, 1e5)(rng);
        for (int i = 0; i < 2000; ++i) {
            es.values.emplace_back(e);
            e += step(rng);
        }
        const EnergySeries back = power_to_energy(energy_to_power(es), *es.values[0]);
        for (std::size_t i = 0; i < es.size(); ++i) {
            if (std::abs(*back.values[i] - *es.values[i]) > 1e-9) {
                ++roundtrip_bad;
                break;
            }
        }
    }

    using std::chrono::hours;
    const PowerSeries actual{{}, hours{1}, {2.0, 4.0}};
    const PowerSeries imputed{{}, hours{1}, {3.0, 3.0}};
    const std::vector<std::size_t> mask{0, 1};
    const double mape = mape_p(actual, imputed, mask).value;
    const double wape = wape_e(std::vector<double>{10.0, 20.0}, std::vector<double>{9.0, 22.0});

    std::ostringstream os;
    os << "trimmed mismatches " << trimmed_bad << "/1000, round-trip mismatches " << roundtrip_bad
       << "/100, MAPE_p " << mape << ", WAPE_E " << wape;
    const bool ok = trimmed_bad == 0 && roundtrip_bad == 0 && mape == 0.375 && wape == 0.1;
    return {ok ? Verdict::pass : Verdict::fail, os.str()};
}

Outcome criterion5(const EnergySeries& year) {
    EnergySeries es = year;
    es.values.resize(35040);
    std::ostringstream os;
    bool ok = true;
    for (double share : kShares) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const MissingnessSpec spec = missingness(share, seed);
            const DegradedSeries a = insert_missing(es, spec);
            const DegradedSeries b = insert_missing(es, spec);
            const auto count = static_cast<std::size_t>(std::llround(share * 35040.0));
            const auto singles = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(count)));
            bool cell_ok = a.mask.indices.size() == count && a.mask.singles.size() == singles &&
                           a.mask.indices == b.mask.indices && a.mask.singles == b.mask.singles &&
                           a.series.values.front() && a.series.values.back();
            std::size_t run = 0;
            for (std::size_t i = 1; i < es.size(); ++i) {
                if (!a.series.values[i]) {
                    ++run;
                    continue;
                }
                if (run > spec.max_gap_len) cell_ok = false;
                run = 0;
            }
            for (std::size_t i = 0; i < es.size(); ++i) {
                if (a.series.values[i] && *a.series.values[i] != *es.values[i]) cell_ok = false;
            }
            if (!cell_ok) {
                ok = false;
                os << "share " << share << " seed " << seed << " violated; ";
            }
        }
    }
    if (ok) os << "6 shares x 3 seeds on n = 35040";
    return {ok ? Verdict::pass : Verdict::fail, os.str()};
}

Outcome criterion6(const ConservationRun& r) {
    std::ostringstream os;
    if (!r.error.empty()) return {Verdict::fail, r.error};
    os << r.cells << " cells, " << r.destructive << " changed present values, " << r.not_idempotent
       << " non-idempotent";
    return {r.destructive == 0 && r.not_idempotent == 0 && r.cells > 0 ? Verdict::pass : Verdict::fail, os.str()};
}

std::vector<NamedSeries> load_uci(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<NamedSeries> out;
    for (const auto& f : files) {
        if (out.size() == 10) break;
        const PowerSeries ps = parse_power_csv(read_file(f.string()));
        if (!ps.complete()) continue;
        out.push_back({f.stem().string(), power_to_energy(ps, 0.0)});
    }
    return out;
}

}  // namespace

int main() {
    std::cout.precision(6);
    const auto suite = synthetic_suite();

    const ConservationRun conservation = run_conservation(suite);
    report(1, "energy conservation of scaled CPI", criterion1(conservation));

    EvaluationConfig cfg;
    cfg.shares = kShares;
    cfg.methods = {Method::cpi, Method::cpi_unscaled, Method::linear, Method::histavg, Method::seasonal};
    const auto t_grid = Clock::now();
    const EvaluationReport grid = evaluate(suite, cfg);
    const double grid_seconds = seconds_since(t_grid);
    std::size_t grid_failures = 0;
    for (const auto& s : grid.scores) grid_failures += s.ok() ? 0 : 1;
    report(2, "method ordering on the synthetic suite", ordering(grid, {0.10, 0.20}));

    report(3, "dissimilarity truth tables", criterion3());
    report(4, "oracle equivalence", criterion4());
    report(5, "gap synthesis contract", criterion5(suite.front().series));
    report(6, "non-destruction and idempotence", criterion6(conservation));

    {
        const DegradedSeries d = insert_missing(suite.front().series, missingness(0.20, 1));
        const auto t0 = Clock::now();
        const ImputationResult r = impute_cpi(d.series);
        const double single = seconds_since(t0);
        std::ostringstream os;
        os << "one series at 20%: " << single << " s; grid of 20 series x 6 shares x 5 methods: " << grid_seconds
           << " s (" << grid_failures << " failed cells)";
        const bool ok = r.completed_power.complete() && single < 30.0 && grid_seconds < 1800.0 && grid_failures == 0;
        report(7, "desk-scale performance", {ok ? Verdict::pass : Verdict::fail, os.str()});
    }

    {
        const char* env = std::getenv("CPIMPUTE_UCI_DIR");
        const fs::path dir = env && *env ? fs::path(env) : fs::path(CPIMPUTE_DEFAULT_UCI_DIR);
        if (dir.empty() || !fs::is_directory(dir)) {
            report(8, "ordering on public data", {Verdict::skip, "dataset not fetched (see tools/fetch_uci.py)"});
        } else {
            const auto uci = load_uci(dir);
            if (uci.size() < 10) {
                report(8, "ordering on public data",
                       {Verdict::fail, "need 10 complete series in " + dir.string() + ", found " +
                                           std::to_string(uci.size())});
            } else {
                const EvaluationReport real = evaluate(uci, cfg);
                report(8, "ordering on public data", ordering(real, kShares));
            }
        }
    }

    std::cout << (failures == 0 ? "acceptance: all criteria met" : "acceptance: some criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
