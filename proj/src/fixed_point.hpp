#pragma once

// Integer-only transcendental functions for allocation weights. Every result
// is a pure function of its integer inputs, so embedding and extraction on
// different hosts derive identical code tables.

#include <cstdint>

namespace dairstega::fixed {

using u128 = unsigned __int128;
using i128 = __int128;

// Weights are Q16.48.
inline constexpr unsigned kFracBits = 48;
inline constexpr std::uint64_t kOne = std::uint64_t{1} << kFracBits;

// floor(sqrt(n)).
u128 isqrt(u128 n);

// log2(x) in Q48 for x >= 1.
std::int64_t log2_q48(std::uint64_t x);
// log2(units / 1e9) in Q48; units in [1, 1e9].
std::int64_t log2_grid_q48(std::uint32_t units);
// 2^(y / 2^48) in Q48 for y <= 0.
std::uint64_t exp2_q48(std::int64_t y);

// units / 1e9 in Q48.
std::uint64_t grid_to_q48(std::uint32_t units);
// sqrt(units / 1e9) in Q48.
std::uint64_t sqrt_grid_q48(std::uint32_t units);

// Rounds a configuration constant to Q32 (x * 2^32, nearest).
std::int64_t to_q32(double x);

}  // namespace dairstega::fixed
