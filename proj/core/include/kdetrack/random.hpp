#pragma once

#include <cstdint>
#include <random>

namespace kdetrack {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent substream seed: splitmix64(master XOR (stream * golden-ratio constant)).
// Forecast step i uses derive_seed(seed, i); the constant keeps stream 0 distinct
// from the master seed's other uses.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace kdetrack
