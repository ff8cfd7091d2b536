#include "cpimpute/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cpimpute {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_nan_literal(std::string_view s) {
    return s == "NaN" || s == "nan" || s == "NAN";
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const std::string_view s = trim(text);
    const auto fail = [&]() -> Timestamp {
        throw ParseError("invalid timestamp '" + std::string(s) + "'");
    };
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return fail();
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), mo) || !parse_int(s.substr(8, 2), d))
        return fail();
    std::string_view rest = s.substr(10);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (!rest.empty()) {
        if (rest[0] != 'T' && rest[0] != ' ') return fail();
        rest.remove_prefix(1);
        if (rest.size() != 5 && rest.size() != 8) return fail();
        if (rest[2] != ':' || !parse_int(rest.substr(0, 2), h) || !parse_int(rest.substr(3, 2), mi))
            return fail();
        if (rest.size() == 8 && (rest[5] != ':' || !parse_int(rest.substr(6, 2), sec))) return fail();
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59 || h < 0 || mi < 0 || sec < 0) return fail();
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss<seconds> tod{t - day_start};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

ParsedColumns parse_columns(std::string_view text, const CsvFormat& format) {
    ParsedColumns out;
    std::vector<Timestamp> stamps;
    std::size_t row = 0;
    bool first_line = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) continue;

        const std::size_t comma = line.find(format.delimiter);
        if (comma == std::string_view::npos) {
            if (first_line) throw ParseError("expected two columns in the first line");
            throw ParseError(row_label(row + 1) + ": expected two columns");
        }
        const std::string_view ts_field = trim(line.substr(0, comma));
        const std::string_view value_field = trim(line.substr(comma + 1));

        Timestamp ts;
        try {
            ts = parse_timestamp(ts_field);
        } catch (const ParseError& e) {
            if (first_line) {  // header
                first_line = false;
                continue;
            }
            throw ParseError(row_label(row + 1) + ": " + e.what());
        }
        first_line = false;
        ++row;

        if (value_field.find(format.delimiter) != std::string_view::npos)
            throw ParseError(row_label(row) + ": expected two columns");

        Reading value;
        if (!value_field.empty() && !is_nan_literal(value_field)) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(value_field.data(), value_field.data() + value_field.size(), v);
            if (ec != std::errc{} || ptr != value_field.data() + value_field.size() || !std::isfinite(v)) {
                throw ParseError(row_label(row) + ": non-numeric value '" + std::string(value_field) + "'");
            }
            value = v;
        }

        if (stamps.size() == 1) {
            out.resolution = std::chrono::duration_cast<Resolution>(ts - stamps[0]);
            if (out.resolution.count() <= 0) throw ParseError(row_label(row) + ": timestamps not increasing");
        } else if (stamps.size() > 1 && ts - stamps.back() != out.resolution) {
            throw ParseError("irregular spacing at " + row_label(row));
        }
        stamps.push_back(ts);
        out.values.push_back(value);
    }

    if (stamps.empty()) throw ParseError("empty input: no data rows");
    if (stamps.size() < 2) throw ParseError("at least two rows are needed to infer the resolution");
    out.start = stamps.front();
    return out;
}

EnergySeries parse_energy_csv(std::string_view text, const CsvFormat& format) {
    ParsedColumns cols = parse_columns(text, format);
    EnergySeries es{cols.start, cols.resolution, std::move(cols.values), format.meter_kind};
    try {
        validate(es, format.monotone_tolerance);
    } catch (const SeriesError& e) {
        throw ParseError(e.what());
    }
    return es;
}

PowerSeries parse_power_csv(std::string_view text, const CsvFormat& format) {
    ParsedColumns cols = parse_columns(text, format);
    return PowerSeries{cols.start, cols.resolution, std::move(cols.values)};
}

namespace {

template <typename Series, typename TimeFn>
std::string write_rows(const Series& s, TimeFn time_of) {
    std::ostringstream os;
    os << "timestamp,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        os << format_timestamp(time_of(i)) << ',';
        if (s.values[i]) os << format_number(*s.values[i]);
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::string to_csv(const EnergySeries& es) {
    return write_rows(es, [&](std::size_t i) { return es.time_at(i); });
}

std::string to_csv(const PowerSeries& ps) {
    return write_rows(ps, [&](std::size_t i) { return ps.interval_start(i); });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace cpimpute
