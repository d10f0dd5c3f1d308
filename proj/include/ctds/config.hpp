#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctds {

struct ConfigEntry {
  std::string key;    // dashes and underscores are interchangeable; stored with dashes
  std::string value;  // surrounding quotes removed
  std::size_t line = 0;
};

/// key = value lines; '#' starts a comment, blank lines are skipped.
/// Values may be quoted; list values are written as space- or comma-separated
/// items, optionally in [brackets].
std::vector<ConfigEntry> parse_config(std::string_view text);
std::vector<ConfigEntry> load_config_file(const std::string& path);

}  // namespace ctds
