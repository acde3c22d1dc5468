#include "wgmr/timetags.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgmr/errors.hpp"

namespace wgmr {

void TimeTagStream::validate_sorted() const {
  for (size_t i = 1; i < tags_ps.size(); ++i)
    if (tags_ps[i] <= tags_ps[i - 1])
      throw ContractError("time-tag stream '" + channel +
                          "' is not strictly increasing at index " +
                          std::to_string(i));
}

namespace {

std::uint8_t channel_byte(const TimeTagStream& s) {
  auto it = s.metadata.find("channel_id");
  if (it == s.metadata.end()) return 0;
  return static_cast<std::uint8_t>(std::stoul(it->second));
}

void atomic_rename(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("rename to '" + path + "' failed: " + ec.message());
  }
}

} // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  atomic_rename(tmp, path);
}

void write_tags_binary(const TimeTagStream& s, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    std::uint8_t ch = channel_byte(s);
    char rec[9];
    for (std::uint64_t t : s.tags_ps) {
      for (int b = 0; b < 8; ++b) rec[b] = static_cast<char>((t >> (8 * b)) & 0xff);
      rec[8] = static_cast<char>(ch);
      out.write(rec, 9);
    }
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("write to '" + tmp + "' failed");
    }
  }
  atomic_rename(tmp, path);
}

TimeTagStream read_tags_binary(const std::string& path, double duration_s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  TimeTagStream s;
  s.channel = path;
  s.duration_s = duration_s;
  char rec[9];
  while (in.read(rec, 9)) {
    std::uint64_t t = 0;
    for (int b = 0; b < 8; ++b)
      t |= static_cast<std::uint64_t>(static_cast<unsigned char>(rec[b])) << (8 * b);
    s.tags_ps.push_back(t);
  }
  if (in.gcount() != 0 && in.gcount() != 9)
    throw IoError("'" + path + "': truncated record (file size not a "
                  "multiple of 9 bytes)");
  s.validate_sorted();
  return s;
}

void write_tags_csv(const TimeTagStream& s, const std::string& path) {
  std::ostringstream os;
  os << "timestamp_ps,channel\n";
  unsigned ch = channel_byte(s);
  for (std::uint64_t t : s.tags_ps) os << t << ',' << ch << '\n';
  atomic_write_text(path, os.str());
}

TimeTagStream read_tags_csv(const std::string& path, double duration_s) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  TimeTagStream s;
  s.channel = path;
  s.duration_s = duration_s;
  std::string line;
  if (!std::getline(in, line) || line.rfind("timestamp_ps", 0) != 0)
    throw IoError("'" + path + "': missing timestamp_ps,channel header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("'" + path + "': malformed CSV line '" + line + "'");
    s.tags_ps.push_back(std::stoull(line.substr(0, comma)));
  }
  s.validate_sorted();
  return s;
}

void write_metadata(const TimeTagStream& s, const std::string& path) {
  std::ostringstream os;
  os << "channel=" << s.channel << '\n';
  os << "duration_s=" << s.duration_s << '\n';
  os << "tag_count=" << s.tags_ps.size() << '\n';
  for (const auto& [k, v] : s.metadata) os << k << '=' << v << '\n';
  atomic_write_text(path, os.str());
}

std::map<std::string, std::string> read_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

} // namespace wgmr
