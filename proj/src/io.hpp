#pragma once

// Deterministic output emission: CSV writers, JSON serialization with
// fixed 17-significant-digit doubles, and the run manifest. Every file an
// OutputSet writes is recorded with its FNV-1a checksum; the manifest is
// the complete list, so there are no orphan writes.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pilot::io {

// %.17g: shortest text that round-trips any double
std::string fmt17(double v);

// nlohmann structure, but numbers printed through fmt17
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

struct ManifestEntry {
  std::string path; // relative to the output directory
  std::size_t bytes = 0;
  std::string fnv1a64;
};

class OutputSet {
public:
  explicit OutputSet(const std::filesystem::path& dir);

  // writes dir/rel, creating parent directories, and records the entry
  void write(const std::string& rel, const std::string& content);
  void write_json(const std::string& rel, const nlohmann::json& j);

  // writes dir/manifest.json listing every file written so far
  void write_manifest();

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<ManifestEntry>& entries() const { return entries_; }

private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

// CSV assembly: header row, then rows of fmt17 numbers
class CsvBuilder {
public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& str() const { return out_; }

private:
  std::size_t ncols_;
  std::string out_;
};

} // namespace pilot::io
