#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dairstega/distribution.hpp"

namespace dairstega {

enum class AllocationKind { kLinear, kSqrt, kExp, kLog, kCondensed };

std::string_view to_string(AllocationKind kind);
AllocationKind parse_allocation_kind(std::string_view name);

// How probabilities map to code counts:
//   linear     beta * p
//   sqrt       sqrt(p)
//   exp        1 - e^(-2p)
//   log        (log2(p) + b) / b, clamped below at 0
//   condensed  p^beta, beta in (0, 1]
struct AllocationSpec {
  AllocationKind kind = AllocationKind::kCondensed;
  unsigned alpha = 8;  // window bits, 1..32
  double beta = 1.0;
  double b = 2.0;  // log kind only

  void validate() const;
  std::uint64_t total_codes() const { return std::uint64_t{1} << alpha; }
};

struct PoolEntry {
  TokenId token;
  std::uint32_t units;  // renormalized probability on the 1e-9 grid

  bool operator==(const PoolEntry&) const = default;
};

// Top-k candidates ordered by probability descending, token id ascending.
struct CandidatePool {
  std::vector<PoolEntry> entries;
  unsigned top_k = 0;

  std::size_t effective_size() const noexcept { return entries.size(); }
  std::optional<std::size_t> index_of(TokenId token) const;
};

// Nonzero, non-excluded tokens, highest first, at most top_k of them, with
// their unrenormalized units. Never throws on small sets.
std::vector<PoolEntry> select_candidates(const TokenDistribution& dist, unsigned top_k,
                                         std::span<const TokenId> excluded = {});

// select_candidates followed by renormalization onto the grid. Throws
// DegenerateDistribution when fewer than two tokens are eligible.
CandidatePool build_pool(const TokenDistribution& dist, unsigned top_k,
                         std::span<const TokenId> excluded = {});

// Renormalizes already-selected candidates; same contract as build_pool.
CandidatePool renormalize_candidates(std::vector<PoolEntry> candidates, unsigned top_k);

inline constexpr unsigned kWeightFractionBits = 48;

// Allocation weights f(p'_j) in Q16.48, computed with integer arithmetic
// only. This is what the codec apportions.
std::vector<std::uint64_t> allocation_weights(const CandidatePool& pool,
                                              const AllocationSpec& spec);

// The same weights as reals, scaled by (2^alpha - 1).
std::vector<double> raw_weights(const CandidatePool& pool, const AllocationSpec& spec);

// Hamilton apportionment without adjustments: floors of w_j * T / sum w, the
// remaining codes one each to the largest remainders, ties to the lowest
// index. Throws ZeroWeightVector.
std::vector<std::uint64_t> largest_remainder(std::span<const std::uint64_t> weights,
                                             std::uint64_t total);

// largest_remainder, then (when total >= size) every zero count takes one
// code from the current largest count. Among equal largest counts the
// highest index gives, which keeps counts monotone in pool order.
std::vector<std::uint64_t> apportion(std::span<const std::uint64_t> weights,
                                     std::uint64_t total);
// Real-valued weights are mapped onto an integer scale first.
std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total);

struct CodeRange {
  TokenId token;
  std::size_t pool_index;
  std::uint64_t begin;  // inclusive
  std::uint64_t end;    // inclusive
};

// Consecutive inclusive ranges tiling [0, total - 1] in pool order. Entries
// with a zero count own no range.
class IntervalTable {
 public:
  IntervalTable() = default;
  IntervalTable(std::uint64_t total, std::vector<CodeRange> ranges);

  std::uint64_t total_codes() const noexcept { return total_; }
  const std::vector<CodeRange>& ranges() const noexcept { return ranges_; }

  const CodeRange& locate(std::uint64_t code) const;
  const CodeRange* find(TokenId token) const;

 private:
  std::uint64_t total_ = 0;
  std::vector<CodeRange> ranges_;
};

// Throws CountMismatch unless counts align with the pool and sum to total.
IntervalTable build_intervals(const CandidatePool& pool, std::span<const std::uint64_t> counts,
                              std::uint64_t total);

// Weights, apportionment and tiling in one step. A weight vector that is
// entirely zero (log kind on a flat pool) is apportioned uniformly.
IntervalTable allocate(const CandidatePool& pool, const AllocationSpec& spec);

struct Prefix {
  std::uint64_t bits = 0;
  unsigned length = 0;

  std::string to_string() const;
};

// Longest shared leading bits of begin and end as alpha-bit numbers.
Prefix common_prefix(std::uint64_t begin, std::uint64_t end, unsigned alpha);

}  // namespace dairstega
