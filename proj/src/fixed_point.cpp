#include "fixed_point.hpp"

#include <array>
#include <bit>
#include <cmath>

#include "dairstega/distribution.hpp"
#include "dairstega/error.hpp"

namespace dairstega::fixed {

namespace {

constexpr unsigned kWork = 62;  // working precision of the log/exp kernels
constexpr u128 kWorkOne = u128{1} << kWork;

// c[i] = 2^(2^-(i+1)) in Q62, derived by repeated integer square roots.
const std::array<u128, kFracBits>& root_chain() {
  static const auto table = [] {
    std::array<u128, kFracBits> c{};
    u128 prev = u128{2} << kWork;
    for (auto& entry : c) {
      entry = isqrt(prev << kWork);
      prev = entry;
    }
    return c;
  }();
  return table;
}

}  // namespace

u128 isqrt(u128 n) {
  if (n == 0) return 0;
  u128 x = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  if (x == 0) x = 1;
  for (int i = 0; i < 3; ++i) x = (x + n / x) >> 1;
  while (x * x > n) --x;
  while ((x + 1) * (x + 1) <= n) ++x;
  return x;
}

std::int64_t log2_q48(std::uint64_t x) {
  if (x == 0) throw Error(ErrorCode::kInvalidArgument, "log2 of zero");
  const int n = 63 - std::countl_zero(x);
  u128 y = n <= static_cast<int>(kWork) ? u128{x} << (kWork - n) : u128{x} >> (n - kWork);
  std::int64_t frac = 0;
  for (unsigned i = 0; i < kFracBits; ++i) {
    y = (y * y) >> kWork;
    if (y >= (kWorkOne << 1)) {
      y >>= 1;
      frac |= std::int64_t{1} << (kFracBits - 1 - i);
    }
  }
  return (std::int64_t{n} << kFracBits) + frac;
}

std::int64_t log2_grid_q48(std::uint32_t units) {
  static const std::int64_t log2_grid = log2_q48(kGridUnits);
  return log2_q48(units) - log2_grid;
}

std::uint64_t exp2_q48(std::int64_t y) {
  if (y > 0) throw Error(ErrorCode::kInvalidArgument, "exp2_q48 expects y <= 0");
  const std::int64_t whole = y >> kFracBits;  // floor
  const std::uint64_t frac = static_cast<std::uint64_t>(y - whole * std::int64_t(kOne));
  const auto& c = root_chain();
  u128 r = kWorkOne;
  for (unsigned i = 0; i < kFracBits; ++i) {
    if (frac & (std::uint64_t{1} << (kFracBits - 1 - i))) r = (r * c[i]) >> kWork;
  }
  const std::int64_t shift = std::int64_t(kWork - kFracBits) - whole;
  return shift >= 128 ? 0 : static_cast<std::uint64_t>(r >> shift);
}

std::uint64_t grid_to_q48(std::uint32_t units) {
  return static_cast<std::uint64_t>((u128{units} << kFracBits) / kGridUnits);
}

std::uint64_t sqrt_grid_q48(std::uint32_t units) {
  return static_cast<std::uint64_t>(isqrt((u128{units} << (2 * kFracBits)) / kGridUnits));
}

std::int64_t to_q32(double x) {
  if (!std::isfinite(x) || std::fabs(x) >= 0x1p30) {
    throw Error(ErrorCode::kInvalidArgument, "constant out of fixed-point range");
  }
  return std::llround(std::ldexp(x, 32));
}

}  // namespace dairstega::fixed
