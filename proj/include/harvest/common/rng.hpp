#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace harvest {

using Rng = std::mt19937_64;

/// Seed for the named substream of a run seed. Every stochastic draw in a run
/// goes through one of these so that adding a consumer never shifts another.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);

inline Rng make_rng(std::uint64_t seed, std::string_view name) {
  return Rng(substream_seed(seed, name));
}

/// Uniform draw on the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace harvest
