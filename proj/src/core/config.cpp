#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "errors.hpp"

namespace edgeminer {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ValidationError("config: " + key + ": expected an integer, got '" + value + "'");
    return out;
}

bool boolean(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError("config: " + key + ": expected true or false, got '" + value + "'");
}

} // namespace

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            body += c;
        }
        body = trim(body);
        if (body.empty() || body.front() == '[') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("config: expected key = value", lineno);
        auto key = trim(body.substr(0, eq));
        auto value = trim(body.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ParseError("config: empty key", lineno);
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply_setting(SimConfig& config, const std::string& raw_key, const std::string& value) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "strategy") {
        auto s = parse_strategy(value);
        if (!s) throw ValidationError("config: unknown strategy '" + value + "'");
        config.strategy = *s;
    } else if (key == "batch_size") {
        config.batch_size = number<std::size_t>(key, value);
        if (config.batch_size == 0) throw ValidationError("config: batch_size must be at least 1");
    } else if (key == "latency") {
        try {
            config.latency = LatencyModel::parse(value);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("config: ") + e.what());
        }
    } else if (key == "window") {
        config.window_age = number<Timestamp>(key, value);
    } else if (key == "window_events") {
        config.window_events = number<std::size_t>(key, value);
    } else if (key == "end_timeout") {
        config.end_timeout = number<Timestamp>(key, value);
    } else if (key == "seed") {
        config.seed = number<std::uint64_t>(key, value);
    } else if (key == "fifo") {
        config.fifo = boolean(key, value);
    } else if (key == "record_trace") {
        config.record_trace = boolean(key, value);
    } else if (key == "snapshot_interval") {
        config.snapshot_interval = number<std::size_t>(key, value);
    } else if (key == "max_searches") {
        config.max_searches = number<std::uint32_t>(key, value);
    } else {
        throw ValidationError("config: unknown key '" + raw_key + "'");
    }
}

void load_config_file(SimConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    for (const auto& [key, value] : parse_config(in)) apply_setting(config, key, value);
}

} // namespace edgeminer
