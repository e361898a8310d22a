#include "dairstega/metrics.hpp"

#include <cmath>
#include <limits>

#include "dairstega/error.hpp"

namespace dairstega {

namespace {

void require_same_size(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "vectors have sizes " + std::to_string(u.size()) +
                                                   " and " + std::to_string(v.size()));
  }
}

double kl_to_mixture(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double m = 0.5 * (p[i] + q[i]);
    sum += p[i] * std::log2(p[i] / m);
  }
  return sum;
}

}  // namespace

std::vector<double> frequency_vector(std::span<const std::vector<TokenId>> corpus,
                                     std::size_t vocab_size) {
  std::vector<double> counts(vocab_size, 0.0);
  std::size_t total = 0;
  for (const auto& doc : corpus) {
    for (TokenId id : doc) {
      if (id >= vocab_size) throw Error(ErrorCode::kInvalidArgument, "token outside vocabulary");
      counts[id] += 1.0;
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyCorpus, "corpus has no tokens");
  for (auto& c : counts) c /= static_cast<double>(total);
  return counts;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  require_same_size(u, v);
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return 100.0 * dot / (std::sqrt(uu) * std::sqrt(vv));
}

double jsd(std::span<const double> u, std::span<const double> v) {
  require_same_size(u, v);
  return 100.0 * (0.5 * kl_to_mixture(u, v) + 0.5 * kl_to_mixture(v, u));
}

double euclidean(std::span<const double> u, std::span<const double> v) {
  require_same_size(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += (u[i] - v[i]) * (u[i] - v[i]);
  return std::sqrt(sum);
}

double manhattan(std::span<const double> u, std::span<const double> v) {
  require_same_size(u, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += std::fabs(u[i] - v[i]);
  return sum;
}

double dot_product_diff(std::span<const double> u, std::span<const double> v) {
  return 100.0 - cosine_similarity(u, v);
}

double perplexity(const LanguageModel& model, std::span<const TokenId> context,
                  std::span<const TokenId> tokens) {
  if (tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "perplexity of an empty sequence");
  std::vector<TokenId> history(context.begin(), context.end());
  double nll = 0.0;
  for (TokenId t : tokens) {
    const TokenDistribution dist = model.next_distribution(history);
    const double p = dist.probability(t);
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    nll -= std::log(p);
    history.push_back(t);
  }
  return std::exp(nll / static_cast<double>(tokens.size()));
}

CorpusComparison compare_corpora(std::span<const std::vector<TokenId>> cover,
                                 std::span<const std::vector<TokenId>> stego,
                                 std::size_t vocab_size) {
  const auto u = frequency_vector(cover, vocab_size);
  const auto v = frequency_vector(stego, vocab_size);
  const double cs = cosine_similarity(u, v);
  return {cs, jsd(u, v), euclidean(u, v), manhattan(u, v), 100.0 - cs};
}

}  // namespace dairstega
