#include "dairstega/distribution.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include "dairstega/error.hpp"

namespace dairstega {

namespace {

template <typename T>
void give_leftover_to_largest(std::vector<T>& units, std::uint64_t assigned) {
  std::size_t largest = 0;
  for (std::size_t i = 1; i < units.size(); ++i) {
    if (units[i] > units[largest]) largest = i;
  }
  units[largest] += static_cast<T>(kGridUnits - assigned);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  bool has_eos = false;
  bool has_unk = false;
  for (TokenId id = 0; id < tokens_.size(); ++id) {
    if (!index_.emplace(tokens_[id], id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate token '" + tokens_[id] + "'");
    }
    if (tokens_[id] == kEosToken) {
      eos_id_ = id;
      has_eos = true;
    } else if (tokens_[id] == kUnkToken) {
      unk_id_ = id;
      has_unk = true;
    }
  }
  if (!has_eos || !has_unk) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary lacks <EOS> or <UNK>");
  }
}

TokenId Vocabulary::id_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? unk_id_ : it->second;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<TokenId> Vocabulary::tokenize(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& word : split_whitespace(text)) ids.push_back(id_of(word));
  return ids;
}

std::string Vocabulary::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id == eos_id_) continue;
    if (!out.empty()) out.push_back(' ');
    out += token(id);
  }
  return out;
}

TokenDistribution::TokenDistribution(std::vector<std::uint32_t> units, std::uint32_t residual)
    : units_(std::move(units)), residual_(residual) {
  const std::uint64_t sum =
      std::accumulate(units_.begin(), units_.end(), std::uint64_t{residual_});
  if (sum != kGridUnits) {
    throw Error(ErrorCode::kInvalidArgument,
                "distribution sums to " + std::to_string(sum) + " grid units");
  }
}

TokenDistribution quantize_renormalize(std::span<const double> raw) {
  double sum = 0.0;
  for (double x : raw) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument, "raw probabilities must be finite and >= 0");
    }
    sum += x;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::kAllZero, "all-zero probability vector");

  std::vector<std::uint32_t> units(raw.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double scaled = std::floor(raw[i] * kGridUnits / sum);
    units[i] = static_cast<std::uint32_t>(std::min(scaled, double{kGridUnits}));
    assigned += units[i];
  }
  // A rounded-down sum can push the floors a few units past the grid total.
  while (assigned > kGridUnits) {
    std::size_t largest = 0;
    for (std::size_t i = 1; i < units.size(); ++i) {
      if (units[i] > units[largest]) largest = i;
    }
    --units[largest];
    --assigned;
  }
  give_leftover_to_largest(units, assigned);
  return TokenDistribution(std::move(units));
}

std::vector<std::uint32_t> quantize_units(std::span<const std::uint64_t> weights) {
  unsigned __int128 sum = 0;
  for (auto w : weights) sum += w;
  if (sum == 0) throw Error(ErrorCode::kAllZero, "all-zero weight vector");
  std::vector<std::uint32_t> units(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    units[i] = static_cast<std::uint32_t>(
        static_cast<unsigned __int128>(weights[i]) * kGridUnits / sum);
    assigned += units[i];
  }
  give_leftover_to_largest(units, assigned);
  return units;
}

}  // namespace dairstega
