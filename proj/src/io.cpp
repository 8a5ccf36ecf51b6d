#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pilot::io {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
void dump_value(const nlohmann::json& j, std::string& out, int indent,
                int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_value(v, out, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += fmt17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}
} // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  out += "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

OutputSet::OutputSet(const std::filesystem::path& dir) : dir_(dir) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::write(const std::string& rel, const std::string& content) {
  const std::filesystem::path full = dir_ / rel;
  std::filesystem::create_directories(full.parent_path());
  std::ofstream f(full, std::ios::binary);
  if (!f) throw std::runtime_error("OutputSet: cannot open " + full.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("OutputSet: short write to " + full.string());
  entries_.push_back({rel, content.size(), fnv1a64_hex(content)});
}

void OutputSet::write_json(const std::string& rel, const nlohmann::json& j) {
  write(rel, dump_json(j));
}

void OutputSet::write_manifest() {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : entries_)
    files.push_back({{"path", e.path},
                     {"bytes", e.bytes},
                     {"fnv1a64", e.fnv1a64}});
  const std::string content = dump_json({{"files", files}});
  const std::filesystem::path full = dir_ / "manifest.json";
  std::ofstream f(full, std::ios::binary);
  if (!f) throw std::runtime_error("OutputSet: cannot open " + full.string());
  f << content;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header)
    : ncols_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvBuilder::row(const std::vector<double>& values) {
  if (values.size() != ncols_)
    throw std::invalid_argument("CsvBuilder: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ += ',';
    out_ += fmt17(values[i]);
  }
  out_ += '\n';
}

} // namespace pilot::io
