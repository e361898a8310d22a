#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dairstega {

using TokenId = std::uint32_t;

// Probabilities are carried as integer multiples of 1e-9.
inline constexpr std::uint32_t kGridUnits = 1'000'000'000;

inline constexpr std::string_view kEosToken = "<EOS>";
inline constexpr std::string_view kUnkToken = "<UNK>";

class Vocabulary {
 public:
  Vocabulary() = default;
  // `tokens` must be unique and contain both reserved tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  TokenId eos_id() const noexcept { return eos_id_; }
  TokenId unk_id() const noexcept { return unk_id_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Unknown words map to <UNK>.
  TokenId id_of(std::string_view word) const;

  // Whitespace tokenization.
  std::vector<TokenId> tokenize(std::string_view text) const;
  // Single-space join; <EOS> is not rendered.
  std::string detokenize(std::span<const TokenId> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId eos_id_ = 0;
  TokenId unk_id_ = 0;
};

std::vector<std::string> split_whitespace(std::string_view text);

// Next-token distribution on the 1e-9 grid. Entries plus the residual bucket
// sum to exactly kGridUnits. The residual is mass a remote provider did not
// attribute to individual tokens; it is never eligible for selection.
class TokenDistribution {
 public:
  TokenDistribution() = default;
  TokenDistribution(std::vector<std::uint32_t> units, std::uint32_t residual = 0);

  std::size_t size() const noexcept { return units_.size(); }
  std::uint32_t units(TokenId id) const { return units_.at(id); }
  const std::vector<std::uint32_t>& all_units() const noexcept { return units_; }
  std::uint32_t residual() const noexcept { return residual_; }
  double probability(TokenId id) const {
    return static_cast<double>(units(id)) / kGridUnits;
  }

  bool operator==(const TokenDistribution&) const = default;

 private:
  std::vector<std::uint32_t> units_;
  std::uint32_t residual_ = 0;
};

// Normalizes, floors every entry to the grid and gives the leftover units to
// the largest entry (ties to the lowest index). Throws AllZero.
TokenDistribution quantize_renormalize(std::span<const double> raw);

// Integer variant: floor(w_j * 1e9 / sum w) with the same leftover rule.
std::vector<std::uint32_t> quantize_units(std::span<const std::uint64_t> weights);

// A deterministic next-token provider. Implementations must return
// bit-identical distributions for identical contexts.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual TokenDistribution next_distribution(std::span<const TokenId> context) const = 0;
  // Model id + revision + quantization tag.
  virtual std::string id() const = 0;
};

}  // namespace dairstega
