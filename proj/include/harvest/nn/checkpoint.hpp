#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "harvest/nn/mlp_spec.hpp"

namespace harvest::nn {

inline constexpr int kMlpCheckpointVersion = 1;

struct MlpRecord {
  MlpSpec spec;
  std::vector<double> params;

  bool operator==(const MlpRecord&) const = default;
};

nlohmann::json to_json(const MlpSpec& spec, const std::vector<double>& params);
MlpRecord mlp_from_json(const nlohmann::json& j);

/// JSON file {"format": "harvest.mlp", "version": 1, "widths", "activations", "params"}.
/// Doubles are written with round-trip precision, so reload is bit-exact.
void save_mlp(const std::filesystem::path& path, const MlpSpec& spec,
              const std::vector<double>& params);
MlpRecord load_mlp(const std::filesystem::path& path);

/// Whole-file JSON read; throws CheckpointError naming the path.
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace harvest::nn
