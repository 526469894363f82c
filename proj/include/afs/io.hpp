// Deterministic output writers: CSV aggregates, JSON-lines per-realization
// records, FNV-1a digests, and the per-run manifest. Data files carry no
// timestamps, so identical (config, seed) runs are byte-identical.

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace afs {

inline constexpr const char* kVersion = "0.1.0";

uint64_t fnv1a64(const std::string& data);
std::string hex64(uint64_t v);
std::string file_digest(const std::string& path);

// Fixed shortest-roundtrip double formatting shared by all writers.
std::string fmt_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::ofstream out_;
  size_t width_;
};

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  void record(const nlohmann::ordered_json& j);
  void close();

 private:
  std::ofstream out_;
};

struct RunManifest {
  std::string command;
  std::string config_digest;
  uint64_t master_seed = 0;
  std::string version = kVersion;
  std::string started_at, finished_at;  // informational only
  std::vector<std::pair<std::string, std::string>> outputs;  // (path, digest)

  void add_output(const std::string& path);
  void write(const std::string& path) const;
};

std::string iso_now();

}  // namespace afs
