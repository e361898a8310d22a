#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dairstega/allocation.hpp"
#include "dairstega/bitstream.hpp"
#include "dairstega/codec.hpp"

namespace dairstega::detail {

// One embedding way: how a candidate pool maps bits to a token and back.
class StepCoder {
 public:
  virtual ~StepCoder() = default;

  virtual unsigned pool_size() const = 0;
  // Pool index to emit for the bits at the cursor and how many bits that
  // token carries (possibly more than remain; the tail is padding).
  virtual std::pair<std::size_t, unsigned> encode(const CandidatePool& pool,
                                                  const BitCursor& cursor) = 0;
  // Appends the bits carried by `token`; false if the token could not have
  // been emitted from this pool.
  virtual bool decode(const CandidatePool& pool, TokenId token, BitString& out) = 0;
};

StegoDocument generate(const LanguageModel& model, const CodecConfig& config,
                       std::string_view embedder, std::string digest, StepCoder& coder,
                       BitCursor cursor);

std::vector<std::uint8_t> recover(const LanguageModel& model, const CodecConfig& config,
                                  const StegoDocument& doc, std::string_view embedder,
                                  const std::string& digest, StepCoder& coder);

struct PoolHash {
  std::size_t operator()(const std::vector<PoolEntry>& entries) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& e : entries) {
      h = (h ^ e.token) * 1099511628211ULL;
      h = (h ^ e.units) * 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// Per-pool derived tables; pools repeat heavily across steps.
template <typename Table>
class PoolCache {
 public:
  template <typename Build>
  const Table& get(const CandidatePool& pool, Build&& build) {
    auto it = tables_.find(pool.entries);
    if (it != tables_.end()) return it->second;
    if (tables_.size() >= kCapacity) tables_.clear();
    return tables_.emplace(pool.entries, build(pool)).first->second;
  }

 private:
  static constexpr std::size_t kCapacity = 1 << 14;
  std::unordered_map<std::vector<PoolEntry>, Table, PoolHash> tables_;
};

}  // namespace dairstega::detail
