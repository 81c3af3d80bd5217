#include "cdmm/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cdmm/error.hpp"

namespace cdmm {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(ErrorCode::config_parse_error, "expected an integer for " + what + ", got '" + text + "'");
  }
  return v;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::istringstream in(t);
  in.imbue(std::locale::classic());
  double v = 0;
  if (t.empty() || !(in >> v) || !in.eof()) {
    fail(ErrorCode::config_parse_error, "expected a number for " + what + ", got '" + text + "'");
  }
  return v;
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config_parse_error, "line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorCode::config_parse_error, "line " + std::to_string(line_no) + ": empty key");
    if (cfg.values_.count(key)) fail(ErrorCode::config_parse_error, "duplicate key '" + key + "'");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config_parse_error, "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = get(key);
  return v ? parse_int(*v, key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  const std::int64_t x = parse_int(*v, key);
  if (x < 0) fail(ErrorCode::config_parse_error, key + " must be non-negative");
  return static_cast<std::uint64_t>(x);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v || v->empty()) return out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(ErrorCode::config_parse_error, "empty item in list " + key);
    out.push_back(item);
  }
  return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : get_list(key)) out.push_back(parse_int(item, key));
  return out;
}

}  // namespace cdmm
