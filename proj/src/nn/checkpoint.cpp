#include "harvest/nn/checkpoint.hpp"

#include <fstream>

#include "harvest/common/error.hpp"

namespace harvest::nn {

nlohmann::json to_json(const MlpSpec& spec, const std::vector<double>& params) {
  nlohmann::json acts = nlohmann::json::array();
  for (Activation a : spec.activations) acts.push_back(to_string(a));
  return {{"format", "harvest.mlp"},
          {"version", kMlpCheckpointVersion},
          {"widths", spec.widths},
          {"activations", acts},
          {"params", params}};
}

MlpRecord mlp_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "harvest.mlp") {
      throw CheckpointError("not an mlp record");
    }
    const int version = j.at("version").get<int>();
    if (version != kMlpCheckpointVersion) {
      throw CheckpointError("mlp record version " + std::to_string(version) + ", expected " +
                            std::to_string(kMlpCheckpointVersion));
    }
    MlpRecord rec;
    rec.spec.widths = j.at("widths").get<std::vector<int>>();
    for (const auto& a : j.at("activations")) {
      rec.spec.activations.push_back(activation_from_string(a.get<std::string>()));
    }
    rec.spec.validate();
    rec.params = j.at("params").get<std::vector<double>>();
    if (rec.params.size() != rec.spec.param_count()) {
      throw CheckpointError("mlp record has " + std::to_string(rec.params.size()) +
                            " parameters, spec needs " + std::to_string(rec.spec.param_count()));
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed mlp record: ") + e.what());
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("invalid mlp record: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw CheckpointError("cannot write " + path.string());
    out << j.dump() << '\n';
    if (!out) throw CheckpointError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void save_mlp(const std::filesystem::path& path, const MlpSpec& spec,
              const std::vector<double>& params) {
  write_json_file(path, to_json(spec, params));
}

MlpRecord load_mlp(const std::filesystem::path& path) { return mlp_from_json(read_json_file(path)); }

}  // namespace harvest::nn
