#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dairstega/bitstream.hpp"
#include "dairstega/codec.hpp"

namespace dairstega {

inline constexpr std::string_view kFlcEmbedder = "flc";
inline constexpr std::string_view kHuffmanEmbedder = "hc";

// Fixed-length coding: each step reads b bits and indexes a pool of 2^b
// tokens. When fewer than 2^b tokens are eligible the step uses the largest
// power of two that fits. `codec.top_k` is ignored.
struct FlcConfig {
  CodecConfig codec;
  unsigned bits_per_step = 1;

  void validate() const;
};

std::string config_digest(const FlcConfig& config);

StegoDocument embed_flc(const LanguageModel& model, const FlcConfig& config, BitCursor cursor);
std::vector<std::uint8_t> extract_flc(const LanguageModel& model, const FlcConfig& config,
                                      const StegoDocument& doc);

// Huffman codebook over a pool. Merges always take the two lightest nodes,
// ties going to the node holding the lowest pool index; the first node taken
// becomes the left child and left edges are bit 0.
class HuffmanTable {
 public:
  explicit HuffmanTable(std::span<const std::uint32_t> weights);

  std::size_t size() const noexcept { return codes_.size(); }
  const BitString& code(std::size_t pool_index) const { return codes_.at(pool_index); }
  std::vector<unsigned> lengths() const;

  // Follows bits from the root until a leaf; returns (pool index, depth).
  template <typename NextBit>
  std::pair<std::size_t, unsigned> walk(NextBit&& next_bit) const {
    std::size_t node = root_;
    unsigned depth = 0;
    while (nodes_[node].leaf < 0) {
      node = next_bit(depth++) ? nodes_[node].right : nodes_[node].left;
    }
    return {static_cast<std::size_t>(nodes_[node].leaf), depth};
  }

 private:
  struct Node {
    std::ptrdiff_t leaf = -1;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::vector<BitString> codes_;
};

std::string config_digest_hc(const CodecConfig& config);

StegoDocument embed_hc(const LanguageModel& model, const CodecConfig& config, BitCursor cursor);
std::vector<std::uint8_t> extract_hc(const LanguageModel& model, const CodecConfig& config,
                                     const StegoDocument& doc);

}  // namespace dairstega
