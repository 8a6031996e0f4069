#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "sim.hpp"

namespace edgeminer {

// key = value lines; '#' starts a comment, values may be quoted, [section]
// headers are ignored. Returns pairs in file order.
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);

// Keys: strategy, batch_size, latency, window, window_events, end_timeout,
// seed, fifo, record_trace, snapshot_interval, max_searches. Dashes are
// accepted in place of underscores. Throws ValidationError on unknown keys or
// bad values.
void apply_setting(SimConfig& config, const std::string& key, const std::string& value);

void load_config_file(SimConfig& config, const std::string& path);

} // namespace edgeminer
