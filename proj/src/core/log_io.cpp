#include "log_io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <functional>
#include <memory>
#include <sstream>
#include <vector>

#include <expat.h>
#include <zlib.h>

#include "csv_util.hpp"
#include "errors.hpp"

namespace edgeminer {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    const auto s = trim(text);
    if (s.empty()) return std::nullopt;

    const bool all_digits = s.find_first_not_of("0123456789", s[0] == '-' ? 1 : 0) == std::string_view::npos;
    if (all_digits && !(s.size() >= 5 && s[4] == '-')) {
        Timestamp v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
        return v;
    }

    int year = 0, month = 0, day = 0;
    if (!read_int(s, 0, 4, year) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, month) ||
        s[7] != '-' || !read_int(s, 8, 2, day)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    std::int64_t seconds = 0;
    std::int64_t micros = 0;
    std::int64_t offset_seconds = 0;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        int hh = 0, mm = 0, ss = 0;
        if (!read_int(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_int(s, pos + 4, 2, mm)) {
            return std::nullopt;
        }
        pos += 6;
        if (pos < s.size() && s[pos] == ':') {
            if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
            pos += 3;
            if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
                ++pos;
                std::int64_t scale = 100000;
                std::size_t digits = 0;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                    if (digits < 6) micros += (s[pos] - '0') * scale;
                    scale /= 10;
                    ++digits;
                    ++pos;
                }
                if (digits == 0) return std::nullopt;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
        seconds = hh * 3600 + mm * 60 + ss;
        if (pos < s.size()) {
            if (s[pos] == 'Z' && pos + 1 == s.size()) {
                pos = s.size();
            } else if (s[pos] == '+' || s[pos] == '-') {
                const int sign = s[pos] == '-' ? -1 : 1;
                int oh = 0, om = 0;
                if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
                std::size_t next = pos + 3;
                if (next < s.size() && s[next] == ':') ++next;
                if (next < s.size()) {
                    if (!read_int(s, next, 2, om)) return std::nullopt;
                    next += 2;
                }
                if (next != s.size()) return std::nullopt;
                offset_seconds = sign * (oh * 3600 + om * 60);
                pos = s.size();
            } else {
                return std::nullopt;
            }
        }
    }
    if (pos != s.size()) return std::nullopt;
    const auto days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return ((days * 86400 + seconds - offset_seconds) * 1000000) + micros;
}

std::string format_timestamp(Timestamp us) {
    std::int64_t secs = us / 1000000;
    std::int64_t frac = us % 1000000;
    if (frac < 0) {
        frac += 1000000;
        secs -= 1;
    }
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60),
                  static_cast<long long>(frac));
    return buf.data();
}

// ---------------------------------------------------------------- XES

namespace {

using ChunkReader = std::function<std::size_t(char*, std::size_t)>;

struct XesState {
    XML_Parser parser = nullptr;
    std::vector<std::string> stack;  // open element names
    std::vector<RawEvent> events;

    bool in_trace = false;
    std::size_t trace_depth = 0;
    std::optional<std::string> case_name;
    std::vector<RawEvent> trace_events;

    bool in_event = false;
    std::size_t event_depth = 0;
    std::size_t event_index = 0;  // global, 0-based, document order
    std::optional<std::string> activity;
    std::optional<std::string> time_text;

    std::string error;
    long error_line = 0;
    bool schema_error = false;

    void fail(std::string msg) {
        if (!error.empty()) return;
        error = std::move(msg);
        error_line = static_cast<long>(XML_GetCurrentLineNumber(parser));
        schema_error = true;
        XML_StopParser(parser, XML_FALSE);
    }
};

const char* find_attr(const XML_Char** attrs, const char* name) {
    for (std::size_t i = 0; attrs[i]; i += 2)
        if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
    return nullptr;
}

void XMLCALL xes_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto& st = *static_cast<XesState*>(data);
    const std::string tag = name;
    const std::size_t depth = st.stack.size();  // depth of the new element's parent chain
    st.stack.push_back(tag);

    if (tag == "trace" && !st.in_trace) {
        st.in_trace = true;
        st.trace_depth = depth;
        st.case_name.reset();
        st.trace_events.clear();
        return;
    }
    if (tag == "event" && st.in_trace && !st.in_event && depth == st.trace_depth + 1) {
        st.in_event = true;
        st.event_depth = depth;
        st.activity.reset();
        st.time_text.reset();
        return;
    }
    const char* key = find_attr(attrs, "key");
    const char* value = find_attr(attrs, "value");
    if (!key) return;
    if (st.in_event && depth == st.event_depth + 1) {
        if (tag == "string" && std::strcmp(key, "concept:name") == 0 && value) st.activity = value;
        if (tag == "date" && std::strcmp(key, "time:timestamp") == 0 && value) st.time_text = value;
    } else if (st.in_trace && !st.in_event && depth == st.trace_depth + 1) {
        if (tag == "string" && std::strcmp(key, "concept:name") == 0 && value) st.case_name = value;
    }
}

void XMLCALL xes_end(void* data, const XML_Char* name) {
    auto& st = *static_cast<XesState*>(data);
    const std::string tag = name;
    st.stack.pop_back();
    const std::size_t depth = st.stack.size();

    if (tag == "event" && st.in_event && depth == st.event_depth) {
        st.in_event = false;
        const auto index = st.event_index++;
        if (!st.activity) {
            st.fail("xes: event " + std::to_string(index) + " lacks a concept:name attribute");
            return;
        }
        if (!st.time_text) {
            st.fail("xes: event " + std::to_string(index) + " lacks a time:timestamp attribute");
            return;
        }
        auto ts = parse_timestamp(*st.time_text);
        if (!ts) {
            st.fail("xes: event " + std::to_string(index) + " has unparseable timestamp '" +
                    *st.time_text + "'");
            return;
        }
        st.trace_events.push_back({std::string(), std::move(*st.activity), *ts});
        return;
    }
    if (tag == "trace" && st.in_trace && depth == st.trace_depth) {
        st.in_trace = false;
        if (!st.case_name) {
            st.fail("xes: trace ending here lacks a concept:name case identifier");
            return;
        }
        for (auto& e : st.trace_events) {
            e.case_id = *st.case_name;
            st.events.push_back(std::move(e));
        }
        st.trace_events.clear();
    }
}

EventLog parse_xes_chunks(const ChunkReader& read) {
    XesState st;
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                         &XML_ParserFree);
    if (!parser) throw Error("xes: cannot allocate XML parser");
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), &xes_start, &xes_end);

    std::vector<char> buf(1 << 16);
    for (;;) {
        const std::size_t got = read(buf.data(), buf.size());
        const bool last = got == 0;
        if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got), last ? XML_TRUE : XML_FALSE) ==
            XML_STATUS_ERROR) {
            if (st.schema_error) throw ValidationError(st.error + " (line " + std::to_string(st.error_line) + ")");
            throw ParseError(std::string("xes: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                             static_cast<long>(XML_GetCurrentLineNumber(parser.get())));
        }
        if (last) break;
    }
    return EventLog::from_raw(std::move(st.events));
}

// ---------------------------------------------------------------- CSV

// Splits one record; handles quoted fields spanning newlines by pulling more lines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, long& line) {
    fields.clear();
    std::string raw;
    if (!std::getline(in, raw)) return false;
    ++line;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= raw.size()) {
            if (quoted) {
                std::string more;
                if (!std::getline(in, more)) throw ParseError("csv: unterminated quoted field", line);
                ++line;
                field += '\n';
                raw = std::move(more);
                i = 0;
                continue;
            }
            break;
        }
        const char c = raw[i++];
        if (quoted) {
            if (c == '"') {
                if (i < raw.size() && raw[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r' || i != raw.size()) {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

EventLog parse_xes(std::istream& in) {
    return parse_xes_chunks([&](char* dst, std::size_t cap) -> std::size_t {
        in.read(dst, static_cast<std::streamsize>(cap));
        return static_cast<std::size_t>(in.gcount());
    });
}

EventLog parse_csv(std::istream& in, const CsvMapping& mapping) {
    std::vector<std::string> fields;
    long line = 0;
    if (!read_csv_record(in, fields, line)) throw ParseError("csv: missing header row", 1);
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);

    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (trim(fields[i]) == name) return i;
        throw ValidationError("csv: unknown column '" + name + "' in mapping");
    };
    const auto case_col = column(mapping.case_column);
    const auto act_col = column(mapping.activity_column);
    const auto ts_col = column(mapping.timestamp_column);
    const auto needed = std::max({case_col, act_col, ts_col});

    std::vector<RawEvent> raw;
    while (read_csv_record(in, fields, line)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() <= needed) {
            throw ParseError("csv: row has " + std::to_string(fields.size()) + " fields, expected at least " +
                                 std::to_string(needed + 1),
                             line);
        }
        auto ts = parse_timestamp(fields[ts_col]);
        if (!ts) throw ParseError("csv: unparseable timestamp '" + fields[ts_col] + "'", line);
        raw.push_back({fields[case_col], fields[act_col], *ts});
    }
    return EventLog::from_raw(std::move(raw));
}

std::string to_canonical_csv(const EventLog& log) {
    std::ostringstream out;
    out << "case_id,activity,timestamp_us\n";
    for (const auto& e : log.events()) {
        out << csv_escape(log.case_name(e.case_index)) << ',' << csv_escape(log.activities().name(e.activity))
            << ',' << e.timestamp << '\n';
    }
    return out.str();
}

LoadedLog read_log(std::istream& in, LogFormat format, const ReadOptions& options) {
    EventLog raw = format == LogFormat::xes ? parse_xes(in) : parse_csv(in, options.mapping);
    auto validated = validate_log(std::move(raw), options.tie_policy);
    return {std::move(validated.log), std::move(validated.report)};
}

LoadedLog read_log_file(const std::string& path, const ReadOptions& options) {
    LogFormat format = LogFormat::csv;
    if (options.format) {
        format = *options.format;
    } else if (ends_with(path, ".xes") || ends_with(path, ".xes.gz")) {
        format = LogFormat::xes;
    } else if (!(ends_with(path, ".csv") || ends_with(path, ".csv.gz"))) {
        throw IoError("cannot infer log format from '" + path + "'; pass the format explicitly");
    }

    // gzread passes plain files through unchanged.
    gzFile file = gzopen(path.c_str(), "rb");
    if (!file) throw IoError("cannot open '" + path + "'");
    std::unique_ptr<gzFile_s, decltype(&gzclose)> guard(file, &gzclose);
    auto reader = [&](char* dst, std::size_t cap) -> std::size_t {
        const int got = gzread(file, dst, static_cast<unsigned>(cap));
        if (got < 0) throw IoError("read error on '" + path + "'");
        return static_cast<std::size_t>(got);
    };

    EventLog raw;
    if (format == LogFormat::xes) {
        raw = parse_xes_chunks(reader);
    } else {
        std::string text;
        std::vector<char> buf(1 << 16);
        while (std::size_t got = reader(buf.data(), buf.size())) text.append(buf.data(), got);
        std::istringstream in(text);
        raw = parse_csv(in, options.mapping);
    }
    auto validated = validate_log(std::move(raw), options.tie_policy);
    return {std::move(validated.log), std::move(validated.report)};
}

} // namespace edgeminer
