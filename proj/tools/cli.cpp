#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "cpimpute/baselines.hpp"
#include "cpimpute/cpi.hpp"
#include "cpimpute/csv.hpp"
#include "cpimpute/evaluation.hpp"
#include "cpimpute/gap_synthesis.hpp"
#include "cpimpute/metrics.hpp"

namespace cpimpute::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    int threads = 0;
    std::string meter = "consumption";
    double tolerance = 0.0;
};

struct ConvertOptions {
    std::string to;
    std::optional<double> base_energy;
    std::string input, output;
};

struct GapOptions {
    double share_pct = 10.0;
    std::optional<std::size_t> max_gap_len;
    double single_fraction = 0.05;
    std::uint64_t seed = 1;
    std::string input, output, mask;
};

struct ImputeOptions {
    std::string method = "cpi";
    std::string weights = "5,1,10";
    bool no_scaling = false;
    std::string input, output, power_out, audit;
};

struct EvaluateOptions {
    std::vector<double> shares_pct{1, 2, 5, 10, 20, 30};
    std::vector<std::string> methods{"all"};
    std::vector<std::uint64_t> seeds{1};
    std::optional<std::size_t> max_gap_len;
    double single_fraction = 0.05;
    std::string weights = "5,1,10";
    std::string input_kind = "energy";
    std::string report = "report.csv";
    std::string aggregate = "aggregate.csv";
    std::vector<std::string> inputs;
};

struct TuneOptions {
    std::string we = "1:20", ww = "0:10", ws = "1:20";
    double share_pct = 10.0;
    std::uint64_t seed = 1;
    std::optional<std::size_t> max_gap_len;
    double single_fraction = 0.05;
    std::string input_kind = "energy";
    std::string scores = "grid_scores.csv";
    std::vector<std::string> inputs;
};

DissimilarityWeights parse_weights(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("weights must be three numbers like 5,1,10, got '" + text + "'");
        }
    }
    if (parts.size() != 3) throw std::invalid_argument("weights must be three numbers like 5,1,10, got '" + text + "'");
    DissimilarityWeights w{parts[0], parts[1], parts[2]};
    w.validate();
    return w;
}

IntRange parse_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("weight range must look like 1:20, got '" + text + "'");
    }
}

MeterKind parse_meter(const std::string& s) {
    return s == "generation" ? MeterKind::generation : MeterKind::consumption;
}

CsvFormat format_of(const CommonOptions& common) {
    CsvFormat f;
    f.meter_kind = parse_meter(common.meter);
    f.monotone_tolerance = common.tolerance;
    return f;
}

EnergySeries load_energy(const std::string& path, const CommonOptions& common) {
    return parse_energy_csv(read_file(path), format_of(common));
}

EnergySeries load_series(const std::string& path, const std::string& kind, const CommonOptions& common) {
    if (kind == "power") {
        return power_to_energy(parse_power_csv(read_file(path), format_of(common)), 0.0,
                               parse_meter(common.meter));
    }
    return load_energy(path, common);
}

std::vector<NamedSeries> load_named(const std::vector<std::string>& paths, const std::string& kind,
                                    const CommonOptions& common) {
    std::vector<NamedSeries> out;
    for (const auto& p : paths) {
        EnergySeries es = load_series(p, kind, common);
        if (!es.complete()) throw std::invalid_argument("'" + p + "' has missing values; evaluation needs ground truth");
        out.push_back({fs::path(p).stem().string(), std::move(es)});
    }
    return out;
}

ExecutionPolicy policy_of(const CommonOptions& common) {
    return ExecutionPolicy{true, common.threads};
}

std::string sibling(const std::string& output, const std::string& suffix) {
    fs::path p(output);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

json gap_json(const Gap& g, const PowerSeries& completed) {
    json j;
    j["first_step"] = g.first_step;
    j["last_step"] = g.last_step;
    j["first_time"] = format_timestamp(completed.interval_start(g.first_pos()));
    j["last_time"] = format_timestamp(completed.interval_start(g.last_pos()));
    j["anchored"] = g.anchored();
    j["actual_energy"] = g.actual_energy ? json(*g.actual_energy) : json(nullptr);
    j["imputed_energy"] = gap_energy(completed, g);
    return j;
}

std::string cpi_audit(const ImputationResult& r) {
    std::ostringstream os;
    for (const auto& a : r.per_gap) {
        json j = gap_json(a.gap, r.completed_power);
        j["pasted_energy"] = a.pasted_energy;
        j["scale_factor"] = a.scale_factor;
        j["uniform_fallback"] = a.uniform_fallback;
        json dates = json::array();
        for (const auto& d : a.matched_dates) dates.push_back(format_timestamp(std::chrono::sys_days{d}).substr(0, 10));
        j["matched_dates"] = dates;
        os << j.dump() << '\n';
    }
    return os.str();
}

std::string baseline_audit(const EnergySeries& degraded, const PowerSeries& completed) {
    std::ostringstream os;
    for (const Gap& g : detect_gaps(degraded)) os << gap_json(g, completed).dump() << '\n';
    return os.str();
}

int cmd_convert(const ConvertOptions& o, const CommonOptions& common, std::ostream& out) {
    const std::string text = read_file(o.input);
    if (o.to == "power") {
        write_file(o.output, to_csv(energy_to_power(parse_energy_csv(text, format_of(common)))));
    } else {
        if (!o.base_energy) throw std::invalid_argument("--base-energy is required to convert power to energy");
        const PowerSeries ps = parse_power_csv(text, format_of(common));
        write_file(o.output, to_csv(power_to_energy(ps, *o.base_energy, parse_meter(common.meter))));
    }
    out << "wrote " << o.output << '\n';
    return 0;
}

int cmd_insert_gaps(const GapOptions& o, const CommonOptions& common, std::ostream& out) {
    const EnergySeries es = load_energy(o.input, common);
    MissingnessSpec spec{o.share_pct / 100.0, o.max_gap_len.value_or(default_max_gap_len(es.resolution)),
                         o.single_fraction, o.seed};
    const DegradedSeries d = insert_missing(es, spec);
    write_file(o.output, to_csv(d.series));
    const std::string mask_path = o.mask.empty() ? sibling(o.output, ".mask.csv") : o.mask;
    write_file(mask_path, mask_to_csv(d.mask, es));
    out << "removed " << d.mask.indices.size() << " of " << es.size() << " readings ("
        << d.mask.singles.size() << " singles); mask in " << mask_path << '\n';
    return 0;
}

int cmd_impute(const ImputeOptions& o, const CommonOptions& common, std::ostream& out) {
    const EnergySeries es = load_energy(o.input, common);
    const Method method = parse_method(o.method);
    std::string audit;
    PowerSeries power;
    EnergySeries energy;
    if (method == Method::cpi || method == Method::cpi_unscaled) {
        CpiConfig cfg{parse_weights(o.weights), method == Method::cpi && !o.no_scaling, policy_of(common)};
        ImputationResult r = impute_cpi(es, cfg);
        audit = cpi_audit(r);
        power = std::move(r.completed_power);
        energy = std::move(r.completed_energy);
    } else {
        power = impute_power(method, es);
        energy = fill_energy_from_power(es, power);
        audit = baseline_audit(es, power);
    }
    const std::string power_path = o.power_out.empty() ? sibling(o.output, ".power.csv") : o.power_out;
    const std::string audit_path = o.audit.empty() ? sibling(o.output, ".audit.jsonl") : o.audit;
    write_file(o.output, to_csv(bound_filled_readings(es, energy)));
    write_file(power_path, to_csv(power));
    write_file(audit_path, audit);
    out << "imputed " << es.missing_count() << " readings with " << method_name(method) << "; wrote "
        << o.output << ", " << power_path << ", " << audit_path << '\n';
    return 0;
}

std::vector<Method> methods_of(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) {
        if (n == "all") {
            for (Method m : standard_methods()) out.push_back(m);
        } else {
            out.push_back(parse_method(n));
        }
    }
    return out;
}

int cmd_evaluate(const EvaluateOptions& o, const CommonOptions& common, std::ostream& out, std::ostream& err) {
    const auto series = load_named(o.inputs, o.input_kind, common);
    EvaluationConfig cfg;
    cfg.shares.clear();
    for (double pct : o.shares_pct) cfg.shares.push_back(pct / 100.0);
    cfg.methods = methods_of(o.methods);
    cfg.seeds = o.seeds;
    cfg.max_gap_len = o.max_gap_len;
    cfg.single_fraction = o.single_fraction;
    cfg.weights = parse_weights(o.weights);
    cfg.execution = policy_of(common);
    const EvaluationReport report = evaluate(series, cfg);
    write_file(o.report, report_csv(report));
    write_file(o.aggregate, aggregate_csv(report));
    std::size_t failed = 0;
    for (const auto& s : report.scores) {
        if (s.ok()) continue;
        ++failed;
        err << "warning: " << s.series_id << " share " << s.share << " seed " << s.seed << ' '
            << method_name(s.method) << ": " << s.error << '\n';
    }
    out << "scored " << report.scores.size() - failed << " of " << report.scores.size() << " cells; wrote "
        << o.report << " and " << o.aggregate << '\n';
    return 0;
}

int cmd_tune(const TuneOptions& o, const CommonOptions& common, std::ostream& out) {
    const auto series = load_named(o.inputs, o.input_kind, common);
    GridSearchConfig cfg;
    cfg.energy = parse_range(o.we);
    cfg.weekday = parse_range(o.ww);
    cfg.season = parse_range(o.ws);
    cfg.share = o.share_pct / 100.0;
    cfg.seed = o.seed;
    cfg.max_gap_len = o.max_gap_len;
    cfg.single_fraction = o.single_fraction;
    cfg.execution = policy_of(common);
    const GridSearchResult r = grid_search_weights(series, cfg);
    write_file(o.scores, grid_csv(r));
    out << "weights " << format_number(r.best.energy) << ',' << format_number(r.best.weekday) << ','
        << format_number(r.best.season) << " mape_p " << format_number(r.best_score) << '\n';
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fill gaps in smart-meter energy readings"};
    app.set_config("--config", "", "key = value file; flags on the command line take precedence");
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--threads", common.threads, "worker threads (0 = OpenMP default)")
        ->envname("CPIMPUTE_THREADS")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--meter", common.meter, "meter kind")->check(CLI::IsMember({"consumption", "generation"}));
    app.add_option("--monotone-tolerance", common.tolerance, "allowed decrease of consumption readings (kWh)");

    ConvertOptions conv;
    auto* convert = app.add_subcommand("convert", "convert between energy and power CSVs");
    convert->add_option("--to", conv.to, "target kind")->required()->check(CLI::IsMember({"power", "energy"}));
    convert->add_option("--base-energy", conv.base_energy, "first meter reading (kWh) for power -> energy");
    convert->add_option("input", conv.input)->required()->check(CLI::ExistingFile);
    convert->add_option("output", conv.output)->required();

    GapOptions gap;
    auto* insert = app.add_subcommand("insert-gaps", "remove readings from a complete energy series");
    insert->add_option("--share", gap.share_pct, "percent of readings to remove")->check(CLI::Range(0.0, 100.0));
    insert->add_option("--max-gap-len", gap.max_gap_len, "longest run in readings (default: 3 days)");
    insert->add_option("--single-fraction", gap.single_fraction, "fraction of removals that are isolated")
        ->check(CLI::Range(0.0, 1.0));
    insert->add_option("--seed", gap.seed);
    insert->add_option("--mask", gap.mask, "mask CSV path (default: <output>.mask.csv)");
    insert->add_option("input", gap.input)->required()->check(CLI::ExistingFile);
    insert->add_option("output", gap.output)->required();

    ImputeOptions imp;
    auto* impute = app.add_subcommand("impute", "fill missing readings of an energy series");
    impute->add_option("--method", imp.method)
        ->check(CLI::IsMember({"cpi", "cpi-unscaled", "linear", "histavg", "seasonal"}));
    impute->add_option("--weights", imp.weights, "w_e,w_w,w_s");
    impute->add_flag("--no-scaling", imp.no_scaling, "skip the energy-preserving rescale");
    impute->add_option("--power-out", imp.power_out, "completed power CSV (default: <output>.power.csv)");
    impute->add_option("--audit", imp.audit, "per-gap JSON lines (default: <output>.audit.jsonl)");
    impute->add_option("input", imp.input)->required()->check(CLI::ExistingFile);
    impute->add_option("output", imp.output)->required();

    EvaluateOptions ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "benchmark methods under synthetic missingness");
    evaluate_cmd->add_option("--shares", ev.shares_pct, "percent shares")->delimiter(',');
    evaluate_cmd->add_option("--method", ev.methods, "methods or 'all'")->delimiter(',');
    evaluate_cmd->add_option("--seeds", ev.seeds)->delimiter(',');
    evaluate_cmd->add_option("--max-gap-len", ev.max_gap_len);
    evaluate_cmd->add_option("--single-fraction", ev.single_fraction)->check(CLI::Range(0.0, 1.0));
    evaluate_cmd->add_option("--weights", ev.weights, "w_e,w_w,w_s");
    evaluate_cmd->add_option("--input-kind", ev.input_kind)->check(CLI::IsMember({"energy", "power"}));
    evaluate_cmd->add_option("--report", ev.report);
    evaluate_cmd->add_option("--aggregate", ev.aggregate);
    evaluate_cmd->add_option("inputs", ev.inputs, "complete series CSVs")->required()->check(CLI::ExistingFile);

    TuneOptions tu;
    auto* tune = app.add_subcommand("tune-weights", "grid search the dissimilarity weights");
    tune->add_option("--we", tu.we, "energy weight range lo:hi");
    tune->add_option("--ww", tu.ww, "weekday weight range lo:hi");
    tune->add_option("--ws", tu.ws, "season weight range lo:hi");
    tune->add_option("--share", tu.share_pct, "percent of readings to remove")->check(CLI::Range(0.0, 100.0));
    tune->add_option("--seed", tu.seed);
    tune->add_option("--max-gap-len", tu.max_gap_len);
    tune->add_option("--single-fraction", tu.single_fraction)->check(CLI::Range(0.0, 1.0));
    tune->add_option("--input-kind", tu.input_kind)->check(CLI::IsMember({"energy", "power"}));
    tune->add_option("--scores", tu.scores, "grid scores CSV");
    tune->add_option("inputs", tu.inputs, "calibration series CSVs")->required()->check(CLI::ExistingFile);

    std::vector<std::string> argv_storage{"cpimpute"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (convert->parsed()) return cmd_convert(conv, common, out);
        if (insert->parsed()) return cmd_insert_gaps(gap, common, out);
        if (impute->parsed()) return cmd_impute(imp, common, out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(ev, common, out, err);
        if (tune->parsed()) return cmd_tune(tu, common, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace cpimpute::cli
