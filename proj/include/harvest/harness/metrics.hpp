#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace harvest::harness {

inline constexpr const char* kMetricsHeader = "run_id,seed,episode,resample_step,inner_iter,metric,value";

/// One CSV row. Episode-level rows (returns, losses) carry resample_step = -1.
struct MetricRow {
  std::string run_id;
  std::uint64_t seed = 0;
  int episode = 0;
  int resample_step = 0;
  long inner_iter = 0;
  std::string metric;
  double value = 0.0;
};

/// Append-only metrics CSV. Values are written in shortest round-trip form,
/// so identical runs give byte-identical files.
class MetricsWriter {
 public:
  /// Creates or truncates `path` and writes the header.
  explicit MetricsWriter(const std::filesystem::path& path);

  void write(const MetricRow& row);
  void flush();
  long rows() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  long rows_ = 0;
};

/// Routes rows to <dir>/<run_id>.csv, one file per run, opened on first use.
class MetricsSink {
 public:
  explicit MetricsSink(std::filesystem::path dir);

  void write(const MetricRow& row);
  void flush();
  /// Files written so far, in order of first use.
  std::vector<std::filesystem::path> files() const;
  long rows() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::unique_ptr<MetricsWriter>>> writers_;
};

std::string format_row(const MetricRow& row);

/// manifest.json next to the metrics of a run, written before any compute.
/// Holds the command, the full resolved config and the library version.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra = nlohmann::json::object());

const char* library_version();

}  // namespace harvest::harness
