#pragma once

#include <span>
#include <vector>

#include "dairstega/distribution.hpp"

namespace dairstega {

// Relative token frequencies over a corpus, indexed by token id.
std::vector<double> frequency_vector(std::span<const std::vector<TokenId>> corpus,
                                     std::size_t vocab_size);

// 100 * cos(u, v). Throws ZeroVector for a zero input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
// Jensen-Shannon divergence in bits, times 100; 0 log 0 = 0.
double jsd(std::span<const double> u, std::span<const double> v);
double euclidean(std::span<const double> u, std::span<const double> v);
double manhattan(std::span<const double> u, std::span<const double> v);
// 100 minus the cosine similarity percentage.
double dot_product_diff(std::span<const double> u, std::span<const double> v);

// exp of the mean natural-log negative likelihood of `tokens` continuing
// `context`. Zero-probability tokens give +inf.
double perplexity(const LanguageModel& model, std::span<const TokenId> context,
                  std::span<const TokenId> tokens);

struct CorpusComparison {
  double cs;
  double jsd;
  double ed;
  double md;
  double delta_dp;
};

CorpusComparison compare_corpora(std::span<const std::vector<TokenId>> cover,
                                 std::span<const std::vector<TokenId>> stego,
                                 std::size_t vocab_size);

}  // namespace dairstega
