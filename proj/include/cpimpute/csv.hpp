#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cpimpute/series.hpp"

namespace cpimpute {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvFormat {
    char delimiter = ',';
    /// Readings may decrease by at most this much (consumption meters only).
    double monotone_tolerance = 0.0;
    MeterKind meter_kind = MeterKind::consumption;
};

/// Timestamps and values of a two-column CSV with validated regular spacing.
struct ParsedColumns {
    Timestamp start{};
    Resolution resolution{};
    std::vector<Reading> values;
};

/// Parses `timestamp,value` rows. The header line is optional. Missing values
/// are an empty field or `NaN`. Spacing is inferred from the first two rows
/// and enforced for all others.
ParsedColumns parse_columns(std::string_view text, const CsvFormat& format = {});

EnergySeries parse_energy_csv(std::string_view text, const CsvFormat& format = {});

/// Power CSVs label each value with the start of its interval.
PowerSeries parse_power_csv(std::string_view text, const CsvFormat& format = {});

std::string to_csv(const EnergySeries& es);
std::string to_csv(const PowerSeries& ps);

Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);
/// Shortest representation that parses back to the same double.
std::string format_number(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cpimpute
