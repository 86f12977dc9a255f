#include "harvest/lyapunov/roa.hpp"

#include <cmath>
#include <sstream>

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"
#include "harvest/nn/checkpoint.hpp"

namespace harvest::lyapunov {

namespace {

constexpr int kRoaVersion = 1;

std::string cache_key(const PendulumParams& p, const LinearController& c, const StateBox& box, int resolution,
                      int horizon, double tolerance) {
  std::ostringstream s;
  for (double v : {p.mass, p.length, p.gravity, p.friction, p.torque_limit, p.dt, c.gain[0], c.gain[1], c.limit,
                   box.half_width[0], box.half_width[1], tolerance}) {
    s << format_double(v) << '|';
  }
  s << resolution << '|' << horizon;
  return s.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RoaGrid empty_grid(const StateBox& box, int resolution, int horizon, double tolerance) {
  if (resolution < 2) throw ConfigError("ROA grid resolution must be at least 2");
  if (horizon < 1) throw ConfigError("ROA horizon must be positive");
  RoaGrid g;
  g.box = box;
  g.resolution = resolution;
  g.horizon = horizon;
  g.tolerance = tolerance;
  const int n = resolution * resolution;
  g.points.resize(2, n);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      g.points.col(j * resolution + i) << -box.half_width[0] + 2.0 * box.half_width[0] * i / (resolution - 1),
          -box.half_width[1] + 2.0 * box.half_width[1] * j / (resolution - 1);
    }
  }
  g.safe.assign(n, 0);
  return g;
}

}  // namespace

RoaGrid compute_roa_grid(const PendulumParams& params, const LinearController& ctrl, const StateBox& box,
                         int resolution, int horizon, double tolerance) {
  params.validate();
  RoaGrid g = empty_grid(box, resolution, horizon, tolerance);
  for (int k = 0; k < g.size(); ++k) {
    const State end = simulate(params, {g.points(0, k), g.points(1, k)}, ctrl, horizon);
    const bool ok = std::hypot(end[0], end[1]) < tolerance;
    g.safe[k] = ok ? 1 : 0;
    g.safe_count += ok ? 1 : 0;
  }
  return g;
}

RoaGrid load_or_compute_roa_grid(const PendulumParams& params, const LinearController& ctrl,
                                 const StateBox& box, const std::filesystem::path& cache_dir, int resolution,
                                 int horizon, double tolerance) {
  if (cache_dir.empty()) return compute_roa_grid(params, ctrl, box, resolution, horizon, tolerance);
  const std::string key = cache_key(params, ctrl, box, resolution, horizon, tolerance);
  char name[64];
  std::snprintf(name, sizeof(name), "roa_%016llx.json", static_cast<unsigned long long>(fnv1a(key)));
  const auto path = cache_dir / name;
  if (std::filesystem::exists(path)) {
    const auto j = nn::read_json_file(path);
    if (j.value("format", "") == "harvest.roa" && j.value("version", 0) == kRoaVersion &&
        j.value("key", "") == key) {
      RoaGrid g = empty_grid(box, resolution, horizon, tolerance);
      const int n = g.size();
      const std::string flags = j.at("safe").get<std::string>();
      if (static_cast<int>(flags.size()) != n) throw CheckpointError("ROA cache " + path.string() + " is truncated");
      for (int k = 0; k < n; ++k) {
        g.safe[k] = flags[k] == '1';
        g.safe_count += g.safe[k];
      }
      return g;
    }
  }
  RoaGrid g = compute_roa_grid(params, ctrl, box, resolution, horizon, tolerance);
  std::string flags(g.safe.size(), '0');
  for (std::size_t k = 0; k < g.safe.size(); ++k) flags[k] = g.safe[k] ? '1' : '0';
  std::filesystem::create_directories(cache_dir);
  nn::write_json_file(path, {{"format", "harvest.roa"}, {"version", kRoaVersion}, {"key", key}, {"safe", flags}});
  return g;
}

}  // namespace harvest::lyapunov
