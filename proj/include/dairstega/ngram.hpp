#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dairstega/distribution.hpp"

namespace dairstega {

inline constexpr std::string_view kNGramMagic = "DAIRNGRM";
inline constexpr std::uint32_t kNGramFormatVersion = 1;

// Word-level n-gram model with add-k smoothing over the full vocabulary.
// Contexts shorter than order - 1 are left-padded with <EOS>, which also
// marks document starts during training. Unseen contexts get the uniform
// (pure smoothing) row.
class NGramModel final : public LanguageModel {
 public:
  // One document per line, whitespace tokens. Throws EmptyCorpus.
  static NGramModel train(std::istream& corpus, unsigned order, double smoothing = 1.0);
  static NGramModel train_text(std::string_view corpus, unsigned order,
                               double smoothing = 1.0);

  static NGramModel load(std::istream& in);
  static NGramModel load_file(const std::string& path);
  void save(std::ostream& out) const;
  std::string serialize() const;

  unsigned order() const noexcept { return order_; }
  double smoothing() const noexcept { return smoothing_; }

  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;
  std::uint64_t context_total(std::span<const TokenId> context) const;

  const Vocabulary& vocabulary() const override { return vocab_; }
  TokenDistribution next_distribution(std::span<const TokenId> context) const override;
  std::string id() const override { return id_; }

 private:
  using Context = std::vector<TokenId>;
  struct Row {
    std::map<TokenId, std::uint64_t> counts;
    std::uint64_t total = 0;
  };

  NGramModel(Vocabulary vocab, unsigned order, double smoothing,
             std::map<Context, Row> rows);

  Context key_for(std::span<const TokenId> context) const;

  Vocabulary vocab_;
  unsigned order_ = 1;
  double smoothing_ = 1.0;
  std::map<Context, Row> rows_;
  std::map<Context, TokenDistribution> cached_;
  TokenDistribution uniform_;
  std::string id_;
};

}  // namespace dairstega
