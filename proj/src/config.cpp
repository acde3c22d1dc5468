#include "wgmr/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wgmr/errors.hpp"

namespace wgmr {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Unit {
  const char* suffix;
  double factor;
};

double parse_with_units(const std::string& text, const Unit* units, int n,
                        const char* kind) {
  std::string t = trim(text);
  for (int i = 0; i < n; ++i) {
    std::string suf = units[i].suffix;
    if (t.size() > suf.size() &&
        t.compare(t.size() - suf.size(), suf.size(), suf) == 0) {
      std::string num = trim(t.substr(0, t.size() - suf.size()));
      // longest-suffix table order ensures e.g. "MHz" wins over "Hz"
      size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(num, &pos);
      } catch (const std::exception&) {
        throw DomainError(std::string("bad ") + kind + " value '" + text + "'");
      }
      if (pos != num.size())
        throw DomainError(std::string("bad ") + kind + " value '" + text + "'");
      return v * units[i].factor;
    }
  }
  throw DomainError(std::string(kind) + " value '" + text +
                    "' must carry a unit suffix");
}

} // namespace

double parse_length(const std::string& text) {
  static const Unit units[] = {{"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9},
                               {"pm", 1e-12}, {"cm", 1e-2}, {"m", 1.0}};
  return parse_with_units(text, units, 6, "length");
}

double parse_time(const std::string& text) {
  static const Unit units[] = {{"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9},
                               {"ps", 1e-12}, {"s", 1.0}};
  return parse_with_units(text, units, 5, "time");
}

double parse_frequency(const std::string& text) {
  static const Unit units[] = {{"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9},
                               {"THz", 1e12}, {"Hz", 1.0}, {"/s", 1.0}};
  return parse_with_units(text, units, 6, "frequency");
}

double parse_temperature(const std::string& text) {
  static const Unit units[] = {{"C", 1.0}};
  return parse_with_units(text, units, 1, "temperature");
}

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DomainError(origin + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw DomainError(origin + ":" + std::to_string(lineno) +
                          ": empty section name");
      cfg.sections_[section]; // sections may be empty
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(origin + ":" + std::to_string(lineno) +
                        ": expected key=value");
    if (section.empty())
      throw DomainError(origin + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw DomainError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw DomainError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + section + "." + key + "'");
    sec[key] = val;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::raw(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw DomainError(origin_ + ": missing required key '" + section + "." +
                      key + "'");
  accessed_.insert(section + "." + key);
  return s->second.at(key);
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  return raw(section, key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? raw(section, key) : fallback;
}

double Config::get_number(const std::string& section, const std::string& key) const {
  std::string v = raw(section, key);
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != v.size())
    throw DomainError(origin_ + ": '" + section + "." + key +
                      "' is not a plain number: '" + v + "'");
  return x;
}

double Config::get_number(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_number(section, key) : fallback;
}

std::int64_t Config::get_integer(const std::string& section,
                                 const std::string& key) const {
  double x = get_number(section, key);
  auto i = static_cast<std::int64_t>(std::llround(x));
  if (std::fabs(x - static_cast<double>(i)) > 1e-9)
    throw DomainError(origin_ + ": '" + section + "." + key +
                      "' must be an integer");
  return i;
}

std::int64_t Config::get_integer(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
  return has(section, key) ? get_integer(section, key) : fallback;
}

std::vector<double> Config::get_number_list(const std::string& section,
                                            const std::string& key) const {
  std::string v = raw(section, key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError(origin_ + ": '" + section + "." + key +
                        "' has a bad list entry '" + item + "'");
    }
  }
  if (out.empty())
    throw DomainError(origin_ + ": '" + section + "." + key + "' is empty");
  return out;
}

std::vector<std::int64_t> Config::get_integer_list(const std::string& section,
                                                   const std::string& key) const {
  auto nums = get_number_list(section, key);
  std::vector<std::int64_t> out;
  for (double x : nums) {
    auto i = static_cast<std::int64_t>(std::llround(x));
    if (std::fabs(x - static_cast<double>(i)) > 1e-9)
      throw DomainError(origin_ + ": '" + section + "." + key +
                        "' must list integers");
    out.push_back(i);
  }
  return out;
}

#define WGMR_DIM_GETTER(NAME, PARSER)                                        \
  double Config::NAME(const std::string& section, const std::string& key)    \
      const {                                                                \
    try {                                                                    \
      return PARSER(raw(section, key));                                      \
    } catch (const DomainError& e) {                                         \
      throw DomainError(origin_ + ": '" + section + "." + key +              \
                        "': " + e.what());                                   \
    }                                                                        \
  }                                                                          \
  double Config::NAME(const std::string& section, const std::string& key,    \
                      double fallback) const {                               \
    return has(section, key) ? NAME(section, key) : fallback;                \
  }

WGMR_DIM_GETTER(get_length, parse_length)
WGMR_DIM_GETTER(get_time, parse_time)
WGMR_DIM_GETTER(get_frequency, parse_frequency)
WGMR_DIM_GETTER(get_temperature, parse_temperature)

#undef WGMR_DIM_GETTER

void Config::reject_unknown() const {
  std::vector<std::string> unknown;
  for (const auto& [sec, kv] : sections_)
    for (const auto& [key, val] : kv)
      if (!accessed_.count(sec + "." + key)) unknown.push_back(sec + "." + key);
  if (!unknown.empty()) {
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw DomainError(msg);
  }
}

} // namespace wgmr
