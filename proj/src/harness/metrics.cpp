#include "harvest/harness/metrics.hpp"

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"
#include "harvest/nn/checkpoint.hpp"

#ifndef HARVEST_VERSION
#define HARVEST_VERSION "unknown"
#endif

namespace harvest::harness {

const char* library_version() { return HARVEST_VERSION; }

std::string format_row(const MetricRow& r) {
  std::string s = r.run_id;
  s += ',';
  s += std::to_string(r.seed);
  s += ',';
  s += std::to_string(r.episode);
  s += ',';
  s += std::to_string(r.resample_step);
  s += ',';
  s += std::to_string(r.inner_iter);
  s += ',';
  s += r.metric;
  s += ',';
  s += format_double(r.value);
  return s;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw Error("cannot write metrics file " + path.string());
  out_ << kMetricsHeader << '\n';
}

void MetricsWriter::write(const MetricRow& row) {
  if (row.run_id.find(',') != std::string::npos || row.metric.find(',') != std::string::npos) {
    throw Error("metrics fields may not contain commas");
  }
  out_ << format_row(row) << '\n';
  if (!out_) throw Error("write failed for " + path_.string());
  ++rows_;
}

void MetricsWriter::flush() { out_.flush(); }

MetricsSink::MetricsSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

void MetricsSink::write(const MetricRow& row) {
  if (!writers_.empty() && writers_.back().first == row.run_id) {
    writers_.back().second->write(row);
    return;
  }
  for (auto& [id, w] : writers_) {
    if (id == row.run_id) {
      w->write(row);
      return;
    }
  }
  if (row.run_id.empty() || row.run_id.find_first_of("/\\,") != std::string::npos) {
    throw Error("run id '" + row.run_id + "' is not a valid file stem");
  }
  writers_.emplace_back(row.run_id, std::make_unique<MetricsWriter>(dir_ / (row.run_id + ".csv")));
  writers_.back().second->write(row);
}

void MetricsSink::flush() {
  for (auto& [id, w] : writers_) w->flush();
}

std::vector<std::filesystem::path> MetricsSink::files() const {
  std::vector<std::filesystem::path> out;
  for (const auto& [id, w] : writers_) out.push_back(w->path());
  return out;
}

long MetricsSink::rows() const {
  long n = 0;
  for (const auto& [id, w] : writers_) n += w->rows();
  return n;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json m = {{"format", "harvest.manifest"},
                      {"version", 1},
                      {"command", command},
                      {"library_version", library_version()},
                      {"metrics_header", kMetricsHeader},
                      {"config", config}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  nn::write_json_file(dir / "manifest.json", m);
}

}  // namespace harvest::harness
