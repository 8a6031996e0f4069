#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "event_model.hpp"

namespace edgeminer {

struct CsvMapping {
    std::string case_column = "case_id";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp_us";
};

enum class LogFormat { xes, csv };

struct ReadOptions {
    std::optional<LogFormat> format;  // guessed from the extension when empty
    CsvMapping mapping;
    TiePolicy tie_policy = TiePolicy::reject;
};

struct LoadedLog {
    EventLog log;
    ValidationReport report;
};

// ISO-8601 (date, optional time, optional fraction, optional Z / +hh:mm offset)
// or a bare integer number of microseconds. Returns nullopt when unparseable.
std::optional<Timestamp> parse_timestamp(std::string_view text);
// UTC, microsecond precision: 2020-01-02T03:04:05.000006Z
std::string format_timestamp(Timestamp us);

// Raw readers: no validation, ids assigned canonically.
EventLog parse_xes(std::istream& in);
EventLog parse_csv(std::istream& in, const CsvMapping& mapping = {});

// Canonical serialization: case_id,activity,timestamp_us in (timestamp, seq) order.
std::string to_canonical_csv(const EventLog& log);

// Reads (optionally gzip-compressed) XES or CSV and validates it.
LoadedLog read_log_file(const std::string& path, const ReadOptions& options = {});
LoadedLog read_log(std::istream& in, LogFormat format, const ReadOptions& options = {});

} // namespace edgeminer
