#include "ctds/config.hpp"

#include <algorithm>

#include "ctds/error.hpp"
#include "ctds/output.hpp"

namespace ctds {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": expected key = value");
    }
    ConfigEntry e;
    e.line = line_no;
    e.key = std::string(trim(line.substr(0, eq)));
    std::replace(e.key.begin(), e.key.end(), '_', '-');
    if (e.key.empty()) throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": empty key");
    std::string_view v = trim(line.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
      e.value = std::string(v.substr(1, v.size() - 2));
    } else {
      if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = trim(v.substr(1, v.size() - 2));
      e.value = std::string(v);
      std::replace(e.value.begin(), e.value.end(), ',', ' ');
    }
    out.push_back(std::move(e));
    if (eol == text.size()) break;
  }
  return out;
}

std::vector<ConfigEntry> load_config_file(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace ctds
