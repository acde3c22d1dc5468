#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wgmr {

// Line-based key=value run configuration with [section] headers. Physical
// quantities carry explicit unit suffixes (1.61mm, 532nm, 27MHz, 80C, ...);
// unitless physical values are rejected. Unknown keys are rejected after a
// command has read what it needs (strict schema).
class Config {
public:
  static Config load(const std::string& path);
  static Config from_string(const std::string& text,
                            const std::string& origin = "<inline>");

  bool has(const std::string& section, const std::string& key) const;

  // typed getters; all throw DomainError with the offending key on misuse
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_number(const std::string& section, const std::string& key) const;
  double get_number(const std::string& section, const std::string& key,
                    double fallback) const;
  std::int64_t get_integer(const std::string& section, const std::string& key) const;
  std::int64_t get_integer(const std::string& section, const std::string& key,
                           std::int64_t fallback) const;
  std::vector<double> get_number_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<std::int64_t> get_integer_list(const std::string& section,
                                             const std::string& key) const;

  // dimensioned getters (SI: metres, seconds, hertz, deg C)
  double get_length(const std::string& section, const std::string& key) const;
  double get_length(const std::string& section, const std::string& key,
                    double fallback) const;
  double get_time(const std::string& section, const std::string& key) const;
  double get_time(const std::string& section, const std::string& key,
                  double fallback) const;
  double get_frequency(const std::string& section, const std::string& key) const;
  double get_frequency(const std::string& section, const std::string& key,
                       double fallback) const;
  double get_temperature(const std::string& section, const std::string& key) const;
  double get_temperature(const std::string& section, const std::string& key,
                         double fallback) const;

  // Throws DomainError naming every key never read by any getter.
  void reject_unknown() const;

  const std::string& origin() const { return origin_; }

private:
  std::string raw(const std::string& section, const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::set<std::string> accessed_;
};

// "1.61mm" -> metres, etc. Exposed for CLI flag parsing.
double parse_length(const std::string& text);
double parse_time(const std::string& text);
double parse_frequency(const std::string& text);
double parse_temperature(const std::string& text);

} // namespace wgmr
