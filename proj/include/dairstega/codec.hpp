#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dairstega/allocation.hpp"
#include "dairstega/bitstream.hpp"
#include "dairstega/distribution.hpp"

namespace dairstega {

enum class EosPolicy {
  kStop,               // <EOS> may be chosen at any step; ending early is an error
  kSuppressUntilDone,  // <EOS> leaves the pool while secret bits remain
};

std::string_view to_string(EosPolicy policy);
EosPolicy parse_eos_policy(std::string_view name);

// Settings shared out-of-band by sender and receiver.
struct CodecConfig {
  std::string provider_id;
  unsigned top_k = 16;
  AllocationSpec spec;
  std::size_t max_tokens = 1024;
  EosPolicy eos_policy = EosPolicy::kSuppressUntilDone;
  std::string instruction;

  void validate() const;
};

inline constexpr std::string_view kDairEmbedder = "dair";

// Binds provider id, allocation parameters, top_k, eos policy and the
// instruction (plus the embedder tag and any embedder parameters).
std::string config_digest(const CodecConfig& config, std::string_view embedder = kDairEmbedder,
                          unsigned embedder_param = 0);

struct StegoDocument {
  std::string embedder = std::string(kDairEmbedder);
  std::string config_digest;
  std::vector<TokenId> token_ids;  // generated tokens, instruction excluded
  std::string text;
  std::uint64_t steps = 0;
  std::uint64_t embedded_bits = 0;

  std::string to_json() const;
  static StegoDocument from_json(std::string_view json_text);
};

// Re-tokenizes stego text received without metadata.
StegoDocument document_from_text(const Vocabulary& vocab, std::string_view text,
                                 std::string digest, std::string_view embedder = kDairEmbedder);

// Generates a stego carrying every bit of `cursor` from its current
// position. Once the bits are spent, generation continues greedily until
// <EOS> or max_tokens. Throws CapacityExhausted, ProviderMismatch,
// DegenerateDistribution.
StegoDocument embed(const LanguageModel& model, const CodecConfig& config, BitCursor cursor);

// Replays the allocation for every stego token and returns the deframed
// payload. Throws ConfigDigestMismatch, ProviderMismatch, TokenNotInPool and
// the deframe errors.
std::vector<std::uint8_t> extract(const LanguageModel& model, const CodecConfig& config,
                                  const StegoDocument& doc);

// Embedded bits per whitespace word of the rendered text.
double measure_bpw(const StegoDocument& doc);

}  // namespace dairstega
