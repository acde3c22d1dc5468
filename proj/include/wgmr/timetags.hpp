#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wgmr {

// A detector channel's click record. Tags are strictly increasing integer
// picoseconds within [0, duration]. mode_labels, when non-empty, runs
// parallel to tags and records which source mode produced each tag
// (simulator-internal provenance; kDarkLabel for dark counts). Labels do
// not survive file round trips.
struct TimeTagStream {
  static constexpr std::uint16_t kDarkLabel = 0xffff;

  std::string channel;
  std::vector<std::uint64_t> tags_ps;
  std::vector<std::uint16_t> mode_labels;
  double duration_s = 0;
  std::map<std::string, std::string> metadata;

  bool labeled() const {
    return !tags_ps.empty() ? mode_labels.size() == tags_ps.size()
                            : !mode_labels.empty();
  }
  void validate_sorted() const; // throws ContractError
};

// Binary format: little-endian records of {uint64 timestamp_ps,
// uint8 channel}, no header. The channel byte is taken from
// metadata["channel_id"] (default 0).
void write_tags_binary(const TimeTagStream& s, const std::string& path);
TimeTagStream read_tags_binary(const std::string& path, double duration_s);

// CSV: header "timestamp_ps,channel", one record per line.
void write_tags_csv(const TimeTagStream& s, const std::string& path);
TimeTagStream read_tags_csv(const std::string& path, double duration_s);

// Sidecar key=value metadata (seed, models, stream ids).
void write_metadata(const TimeTagStream& s, const std::string& path);
std::map<std::string, std::string> read_metadata(const std::string& path);

// Writes to <path>.tmp then renames, so failures never leave partial files.
void atomic_write_text(const std::string& path, const std::string& content);

} // namespace wgmr
