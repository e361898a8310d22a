#include "dairstega/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "dairstega/error.hpp"
#include "fixed_point.hpp"

namespace dairstega {

namespace {

using fixed::u128;

bool ranks_before(const PoolEntry& a, const PoolEntry& b) {
  return a.units != b.units ? a.units > b.units : a.token < b.token;
}

}  // namespace

std::string_view to_string(AllocationKind kind) {
  switch (kind) {
    case AllocationKind::kLinear: return "linear";
    case AllocationKind::kSqrt: return "sqrt";
    case AllocationKind::kExp: return "exp";
    case AllocationKind::kLog: return "log";
    case AllocationKind::kCondensed: return "condensed";
  }
  return "unknown";
}

AllocationKind parse_allocation_kind(std::string_view name) {
  for (auto kind : {AllocationKind::kLinear, AllocationKind::kSqrt, AllocationKind::kExp,
                    AllocationKind::kLog, AllocationKind::kCondensed}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown allocation kind '" + std::string(name) + "'");
}

void AllocationSpec::validate() const {
  if (alpha < 1 || alpha > 32) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in [1, 32]");
  }
  if (!std::isfinite(beta) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidArgument, "allocation parameters must be finite");
  }
  switch (kind) {
    case AllocationKind::kCondensed:
      if (!(beta > 0.0 && beta <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "condensed allocation needs beta in (0, 1]");
      }
      break;
    case AllocationKind::kLinear:
      if (!(beta > 0.0) || beta > 1024.0) {
        throw Error(ErrorCode::kInvalidArgument, "linear allocation needs beta in (0, 1024]");
      }
      break;
    case AllocationKind::kLog:
      if (!(b >= 2.0) || b > 1024.0) {
        throw Error(ErrorCode::kInvalidArgument, "log allocation needs b in [2, 1024]");
      }
      break;
    default:
      break;
  }
}

std::optional<std::size_t> CandidatePool::index_of(TokenId token) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].token == token) return i;
  }
  return std::nullopt;
}

std::vector<PoolEntry> select_candidates(const TokenDistribution& dist, unsigned top_k,
                                         std::span<const TokenId> excluded) {
  std::vector<PoolEntry> eligible;
  const auto& units = dist.all_units();
  for (TokenId id = 0; id < units.size(); ++id) {
    if (units[id] == 0) continue;
    if (std::find(excluded.begin(), excluded.end(), id) != excluded.end()) continue;
    eligible.push_back({id, units[id]});
  }
  const std::size_t keep = std::min<std::size_t>(top_k, eligible.size());
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(keep),
                    eligible.end(), ranks_before);
  eligible.resize(keep);
  return eligible;
}

CandidatePool build_pool(const TokenDistribution& dist, unsigned top_k,
                         std::span<const TokenId> excluded) {
  if (top_k < 2) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 2");
  return renormalize_candidates(select_candidates(dist, top_k, excluded), top_k);
}

CandidatePool renormalize_candidates(std::vector<PoolEntry> candidates, unsigned top_k) {
  CandidatePool pool{std::move(candidates), top_k};
  if (pool.entries.size() < 2) {
    throw Error(ErrorCode::kDegenerateDistribution,
                "fewer than two eligible tokens with nonzero probability");
  }
  std::vector<std::uint64_t> raw;
  raw.reserve(pool.entries.size());
  for (const auto& e : pool.entries) raw.push_back(e.units);
  const auto renormalized = quantize_units(raw);
  for (std::size_t i = 0; i < pool.entries.size(); ++i) pool.entries[i].units = renormalized[i];
  // The leftover unit can reorder near-ties.
  std::sort(pool.entries.begin(), pool.entries.end(), ranks_before);
  return pool;
}

std::vector<std::uint64_t> allocation_weights(const CandidatePool& pool,
                                              const AllocationSpec& spec) {
  spec.validate();
  const std::int64_t beta = fixed::to_q32(spec.beta);
  const std::int64_t b = fixed::to_q32(spec.b);
  constexpr std::int64_t kQ32One = std::int64_t{1} << 32;

  std::vector<std::uint64_t> w;
  w.reserve(pool.entries.size());
  for (const auto& e : pool.entries) {
    if (e.units == 0) {
      w.push_back(0);
      continue;
    }
    switch (spec.kind) {
      case AllocationKind::kLinear:
        w.push_back(static_cast<std::uint64_t>(
            (u128{fixed::grid_to_q48(e.units)} * static_cast<std::uint64_t>(beta)) >> 32));
        break;
      case AllocationKind::kSqrt:
        w.push_back(fixed::sqrt_grid_q48(e.units));
        break;
      case AllocationKind::kExp: {
        // e^(-2p) = 2^(-2p log2 e)
        constexpr u128 kLog2E = 0x5c551d94ae0bf85dULL;  // log2(e) in Q62
        const auto exponent = static_cast<std::int64_t>(
            (u128{fixed::grid_to_q48(e.units)} * 2 * kLog2E) >> 62);
        w.push_back(fixed::kOne - fixed::exp2_q48(-exponent));
        break;
      }
      case AllocationKind::kLog: {
        const fixed::i128 scaled =
            (fixed::i128{fixed::log2_grid_q48(e.units)} * kQ32One) / b;
        const fixed::i128 value = fixed::i128{fixed::kOne} + scaled;
        w.push_back(value > 0 ? static_cast<std::uint64_t>(value) : 0);
        break;
      }
      case AllocationKind::kCondensed:
        if (beta == kQ32One) {
          w.push_back(fixed::grid_to_q48(e.units));
        } else if (beta == kQ32One / 2) {
          w.push_back(fixed::sqrt_grid_q48(e.units));
        } else {
          const fixed::i128 y = (fixed::i128{fixed::log2_grid_q48(e.units)} * beta) >> 32;
          w.push_back(fixed::exp2_q48(static_cast<std::int64_t>(y)));
        }
        break;
    }
  }
  return w;
}

std::vector<double> raw_weights(const CandidatePool& pool, const AllocationSpec& spec) {
  const auto w = allocation_weights(pool, spec);
  const double scale = static_cast<double>(spec.total_codes() - 1);
  std::vector<double> out;
  out.reserve(w.size());
  for (auto x : w) out.push_back(std::ldexp(static_cast<double>(x), -int(kWeightFractionBits)) * scale);
  return out;
}

std::vector<std::uint64_t> largest_remainder(std::span<const std::uint64_t> weights,
                                             std::uint64_t total) {
  u128 sum = 0;
  for (auto w : weights) sum += w;
  if (sum == 0) throw Error(ErrorCode::kZeroWeightVector, "all weights are zero");
  if (sum >> 64) throw Error(ErrorCode::kInvalidArgument, "weight sum exceeds 64 bits");

  std::vector<std::uint64_t> counts(weights.size());
  std::vector<std::uint64_t> remainders(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const u128 scaled = u128{weights[i]} * total;
    counts[i] = static_cast<std::uint64_t>(scaled / sum);
    remainders[i] = static_cast<std::uint64_t>(scaled % sum);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i]];
  return counts;
}

std::vector<std::uint64_t> apportion(std::span<const std::uint64_t> weights,
                                     std::uint64_t total) {
  auto counts = largest_remainder(weights, total);
  if (total < counts.size()) return counts;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) continue;
    std::size_t donor = 0;
    for (std::size_t j = 1; j < counts.size(); ++j) {
      if (counts[j] >= counts[donor]) donor = j;
    }
    --counts[donor];
    ++counts[i];
  }
  return counts;
}

std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total) {
  double largest = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and >= 0");
    }
    largest = std::max(largest, w);
  }
  if (largest == 0.0) throw Error(ErrorCode::kZeroWeightVector, "all weights are zero");
  std::vector<std::uint64_t> scaled;
  scaled.reserve(weights.size());
  for (double w : weights) {
    scaled.push_back(static_cast<std::uint64_t>(std::llround(std::ldexp(w / largest, 52))));
  }
  return apportion(std::span<const std::uint64_t>(scaled), total);
}

IntervalTable::IntervalTable(std::uint64_t total, std::vector<CodeRange> ranges)
    : total_(total), ranges_(std::move(ranges)) {}

const CodeRange& IntervalTable::locate(std::uint64_t code) const {
  if (code >= total_ || ranges_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "code outside the table");
  }
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), code,
                             [](std::uint64_t c, const CodeRange& r) { return c < r.begin; });
  return *std::prev(it);
}

const CodeRange* IntervalTable::find(TokenId token) const {
  for (const auto& r : ranges_) {
    if (r.token == token) return &r;
  }
  return nullptr;
}

IntervalTable build_intervals(const CandidatePool& pool, std::span<const std::uint64_t> counts,
                              std::uint64_t total) {
  if (counts.size() != pool.entries.size()) {
    throw Error(ErrorCode::kCountMismatch, "count vector does not match the pool");
  }
  std::vector<CodeRange> ranges;
  std::uint64_t next = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (counts[i] > total - next) break;
    ranges.push_back({pool.entries[i].token, i, next, next + counts[i] - 1});
    next += counts[i];
  }
  if (next != total || ranges.size() != static_cast<std::size_t>(std::count_if(
                                             counts.begin(), counts.end(),
                                             [](std::uint64_t c) { return c != 0; }))) {
    throw Error(ErrorCode::kCountMismatch, "counts do not sum to " + std::to_string(total));
  }
  return IntervalTable(total, std::move(ranges));
}

IntervalTable allocate(const CandidatePool& pool, const AllocationSpec& spec) {
  auto weights = allocation_weights(pool, spec);
  if (std::all_of(weights.begin(), weights.end(), [](std::uint64_t w) { return w == 0; })) {
    std::fill(weights.begin(), weights.end(), 1);
  }
  const std::uint64_t total = spec.total_codes();
  return build_intervals(pool, apportion(std::span<const std::uint64_t>(weights), total), total);
}

std::string Prefix::to_string() const {
  std::string out;
  for (unsigned i = length; i-- > 0;) out.push_back((bits >> i) & 1u ? '1' : '0');
  return out;
}

Prefix common_prefix(std::uint64_t begin, std::uint64_t end, unsigned alpha) {
  if (alpha < 1 || alpha > 32 || begin > end || end >> alpha) {
    throw Error(ErrorCode::kInvalidArgument, "bad range for common_prefix");
  }
  const unsigned differing = static_cast<unsigned>(std::bit_width(begin ^ end));
  const unsigned length = alpha - differing;
  return Prefix{begin >> differing, length};
}

}  // namespace dairstega
