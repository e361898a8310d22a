#include "dairstega/baselines.hpp"

#include <bit>
#include <set>
#include <tuple>

#include "dairstega/error.hpp"
#include "step_coder.hpp"

namespace dairstega {

void FlcConfig::validate() const {
  if (bits_per_step < 1 || bits_per_step > 8) {
    throw Error(ErrorCode::kInvalidArgument, "FLC bits per step must be in [1, 8]");
  }
  codec.validate();
}

std::string config_digest(const FlcConfig& config) {
  return config_digest(config.codec, kFlcEmbedder, config.bits_per_step);
}

std::string config_digest_hc(const CodecConfig& config) {
  return config_digest(config, kHuffmanEmbedder);
}

HuffmanTable::HuffmanTable(std::span<const std::uint32_t> weights) : codes_(weights.size()) {
  if (weights.empty()) throw Error(ErrorCode::kInvalidArgument, "empty Huffman alphabet");
  // (weight, lowest pool index below the node, node id)
  std::set<std::tuple<std::uint64_t, std::size_t, std::size_t>> queue;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    nodes_.push_back(Node{static_cast<std::ptrdiff_t>(i), 0, 0});
    queue.emplace(weights[i], i, i);
  }
  while (queue.size() > 1) {
    const auto [w0, min0, left] = *queue.begin();
    queue.erase(queue.begin());
    const auto [w1, min1, right] = *queue.begin();
    queue.erase(queue.begin());
    nodes_.push_back(Node{-1, left, right});
    queue.emplace(w0 + w1, std::min(min0, min1), nodes_.size() - 1);
  }
  root_ = std::get<2>(*queue.begin());

  std::vector<std::pair<std::size_t, BitString>> stack{{root_, BitString{}}};
  while (!stack.empty()) {
    auto [node, prefix] = std::move(stack.back());
    stack.pop_back();
    if (nodes_[node].leaf >= 0) {
      codes_[static_cast<std::size_t>(nodes_[node].leaf)] = std::move(prefix);
      continue;
    }
    BitString left = prefix;
    left.push_back(false);
    prefix.push_back(true);
    stack.emplace_back(nodes_[node].left, std::move(left));
    stack.emplace_back(nodes_[node].right, std::move(prefix));
  }
}

std::vector<unsigned> HuffmanTable::lengths() const {
  std::vector<unsigned> out;
  for (const auto& c : codes_) out.push_back(static_cast<unsigned>(c.size()));
  return out;
}

namespace {

class FlcCoder final : public detail::StepCoder {
 public:
  explicit FlcCoder(unsigned bits) : bits_(bits) {}

  unsigned pool_size() const override { return 1u << bits_; }

  std::pair<std::size_t, unsigned> encode(const CandidatePool& pool,
                                          const BitCursor& cursor) override {
    const unsigned width = width_for(pool);
    return {static_cast<std::size_t>(cursor.read_window(width).value), width};
  }

  bool decode(const CandidatePool& pool, TokenId token, BitString& out) override {
    const auto index = pool.index_of(token);
    const unsigned width = width_for(pool);
    if (!index || *index >= (std::size_t{1} << width)) return false;
    out.append(*index, width);
    return true;
  }

 private:
  unsigned width_for(const CandidatePool& pool) const {
    return std::min<unsigned>(bits_, std::bit_width(pool.effective_size()) - 1);
  }

  unsigned bits_;
};

class HuffmanCoder final : public detail::StepCoder {
 public:
  explicit HuffmanCoder(unsigned top_k) : top_k_(top_k) {}

  unsigned pool_size() const override { return top_k_; }

  std::pair<std::size_t, unsigned> encode(const CandidatePool& pool,
                                          const BitCursor& cursor) override {
    return table_for(pool).walk([&](unsigned depth) { return cursor.peek(depth); });
  }

  bool decode(const CandidatePool& pool, TokenId token, BitString& out) override {
    const auto index = pool.index_of(token);
    if (!index) return false;
    out.append(table_for(pool).code(*index));
    return true;
  }

 private:
  const HuffmanTable& table_for(const CandidatePool& pool) {
    return cache_.get(pool, [](const CandidatePool& p) {
      std::vector<std::uint32_t> weights;
      for (const auto& e : p.entries) weights.push_back(e.units);
      return HuffmanTable(weights);
    });
  }

  unsigned top_k_;
  detail::PoolCache<HuffmanTable> cache_;
};

}  // namespace

StegoDocument embed_flc(const LanguageModel& model, const FlcConfig& config, BitCursor cursor) {
  config.validate();
  FlcCoder coder(config.bits_per_step);
  return detail::generate(model, config.codec, kFlcEmbedder, config_digest(config), coder,
                          std::move(cursor));
}

std::vector<std::uint8_t> extract_flc(const LanguageModel& model, const FlcConfig& config,
                                      const StegoDocument& doc) {
  config.validate();
  FlcCoder coder(config.bits_per_step);
  return detail::recover(model, config.codec, doc, kFlcEmbedder, config_digest(config), coder);
}

StegoDocument embed_hc(const LanguageModel& model, const CodecConfig& config, BitCursor cursor) {
  HuffmanCoder coder(config.top_k);
  return detail::generate(model, config, kHuffmanEmbedder, config_digest_hc(config), coder,
                          std::move(cursor));
}

std::vector<std::uint8_t> extract_hc(const LanguageModel& model, const CodecConfig& config,
                                     const StegoDocument& doc) {
  HuffmanCoder coder(config.top_k);
  return detail::recover(model, config, doc, kHuffmanEmbedder, config_digest_hc(config), coder);
}

}  // namespace dairstega
