#include "dairstega/codec.hpp"

#include <algorithm>

#include <json.hpp>

#include "dairstega/digest.hpp"
#include "dairstega/error.hpp"
#include "step_coder.hpp"

namespace dairstega {

using nlohmann::json;

std::string_view to_string(EosPolicy policy) {
  return policy == EosPolicy::kStop ? "stop" : "suppress_until_done";
}

EosPolicy parse_eos_policy(std::string_view name) {
  if (name == "stop") return EosPolicy::kStop;
  if (name == "suppress_until_done") return EosPolicy::kSuppressUntilDone;
  throw Error(ErrorCode::kInvalidArgument, "unknown eos policy '" + std::string(name) + "'");
}

void CodecConfig::validate() const {
  if (top_k < 2) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 2");
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be at least 1");
  spec.validate();
}

std::string config_digest(const CodecConfig& config, std::string_view embedder,
                          unsigned embedder_param) {
  // json objects serialize with sorted keys, which makes the dump canonical.
  const json canonical = {
      {"format", "dairstega-config/1"},
      {"embedder", std::string(embedder)},
      {"embedder_param", embedder_param},
      {"provider_id", config.provider_id},
      {"top_k", config.top_k},
      {"kind", std::string(to_string(config.spec.kind))},
      {"alpha", config.spec.alpha},
      {"beta", config.spec.beta},
      {"b", config.spec.b},
      {"eos_policy", std::string(to_string(config.eos_policy))},
      {"instruction", config.instruction},
  };
  return sha256_hex(canonical.dump());
}

std::string StegoDocument::to_json() const {
  return json{{"embedder", embedder},
              {"config_digest", config_digest},
              {"token_ids", token_ids},
              {"text", text},
              {"steps", steps},
              {"embedded_bits", embedded_bits}}
      .dump();
}

StegoDocument StegoDocument::from_json(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    StegoDocument doc;
    doc.embedder = j.value("embedder", std::string(kDairEmbedder));
    doc.config_digest = j.at("config_digest").get<std::string>();
    doc.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
    doc.text = j.at("text").get<std::string>();
    doc.steps = j.at("steps").get<std::uint64_t>();
    doc.embedded_bits = j.at("embedded_bits").get<std::uint64_t>();
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed stego document: ") + e.what());
  }
}

StegoDocument document_from_text(const Vocabulary& vocab, std::string_view text,
                                 std::string digest, std::string_view embedder) {
  StegoDocument doc;
  doc.embedder = std::string(embedder);
  doc.config_digest = std::move(digest);
  doc.token_ids = vocab.tokenize(text);
  doc.text = vocab.detokenize(doc.token_ids);
  doc.steps = doc.token_ids.size();
  return doc;
}

double measure_bpw(const StegoDocument& doc) {
  const auto words = split_whitespace(doc.text).size();
  return words == 0 ? 0.0 : static_cast<double>(doc.embedded_bits) / static_cast<double>(words);
}

namespace detail {

namespace {

void check_provider(const LanguageModel& model, const CodecConfig& config) {
  if (model.id() != config.provider_id) {
    throw Error(ErrorCode::kProviderMismatch, "config names provider '" + config.provider_id +
                                                  "' but the model is '" + model.id() + "'");
  }
}

std::vector<TokenId> excluded_tokens(const Vocabulary& vocab, const CodecConfig& config,
                                     bool bits_remain) {
  std::vector<TokenId> excluded{vocab.unk_id()};
  if (bits_remain && config.eos_policy == EosPolicy::kSuppressUntilDone) {
    excluded.push_back(vocab.eos_id());
  }
  return excluded;
}

}  // namespace

StegoDocument generate(const LanguageModel& model, const CodecConfig& config,
                       std::string_view embedder, std::string digest, StepCoder& coder,
                       BitCursor cursor) {
  config.validate();
  check_provider(model, config);
  const Vocabulary& vocab = model.vocabulary();

  StegoDocument doc;
  doc.embedder = std::string(embedder);
  doc.config_digest = std::move(digest);
  std::vector<TokenId> context = vocab.tokenize(config.instruction);
  const std::uint64_t start = cursor.position();

  while (doc.token_ids.size() < config.max_tokens) {
    const bool bits_remain = !cursor.exhausted();
    const TokenDistribution dist = model.next_distribution(context);
    const auto excluded = excluded_tokens(vocab, config, bits_remain);
    auto candidates =
        select_candidates(dist, bits_remain ? coder.pool_size() : 1, excluded);
    if (candidates.empty()) {
      throw Error(ErrorCode::kDegenerateDistribution, "no eligible token at step " +
                                                          std::to_string(doc.steps));
    }
    TokenId token = candidates.front().token;
    if (bits_remain && candidates.size() > 1) {
      const CandidatePool pool = renormalize_candidates(std::move(candidates), coder.pool_size());
      const auto [index, carried] = coder.encode(pool, cursor);
      token = pool.entries[index].token;
      cursor.advance(carried);
    }
    doc.token_ids.push_back(token);
    context.push_back(token);
    ++doc.steps;
    if (token == vocab.eos_id()) break;
  }
  doc.embedded_bits = cursor.position() - start;
  if (!cursor.exhausted()) {
    throw Error(ErrorCode::kCapacityExhausted,
                std::to_string(cursor.remaining()) + " bits left after " +
                    std::to_string(doc.steps) + " tokens");
  }
  doc.text = vocab.detokenize(doc.token_ids);
  return doc;
}

std::vector<std::uint8_t> recover(const LanguageModel& model, const CodecConfig& config,
                                  const StegoDocument& doc, std::string_view embedder,
                                  const std::string& digest, StepCoder& coder) {
  config.validate();
  if (doc.embedder != embedder) {
    throw Error(ErrorCode::kConfigDigestMismatch,
                "document was produced by embedder '" + doc.embedder + "'");
  }
  if (doc.config_digest != digest) {
    throw Error(ErrorCode::kConfigDigestMismatch,
                "document digest does not match the codec configuration");
  }
  check_provider(model, config);
  const Vocabulary& vocab = model.vocabulary();

  std::vector<TokenId> context = vocab.tokenize(config.instruction);
  BitString bits;
  std::optional<std::uint64_t> total;
  for (std::size_t step = 0; step < doc.token_ids.size(); ++step) {
    const TokenId token = doc.token_ids[step];
    const bool bits_remain = !total || bits.size() < *total;
    const TokenDistribution dist = model.next_distribution(context);
    const auto excluded = excluded_tokens(vocab, config, bits_remain);
    auto candidates = select_candidates(dist, coder.pool_size(), excluded);
    auto in_pool = [&] {
      return std::any_of(candidates.begin(), candidates.end(),
                         [&](const PoolEntry& e) { return e.token == token; });
    };
    if (!in_pool()) {
      throw Error(ErrorCode::kTokenNotInPool,
                  "token " + std::to_string(token) + " at step " + std::to_string(step) +
                      " is not in the reconstructed candidate pool");
    }
    if (bits_remain && candidates.size() > 1) {
      const CandidatePool pool = renormalize_candidates(std::move(candidates), coder.pool_size());
      if (!coder.decode(pool, token, bits)) {
        throw Error(ErrorCode::kTokenNotInPool,
                    "token " + std::to_string(token) + " at step " + std::to_string(step) +
                        " owns no code in the reconstructed allocation");
      }
    }
    if (!total && bits.size() >= kFrameHeaderBits) {
      total = kFrameHeaderBits + std::uint64_t{parse_header(bits).payload_bit_length};
    }
    context.push_back(token);
  }
  if (!total || bits.size() < *total) {
    throw Error(ErrorCode::kTruncatedPayload,
                "stego carries " + std::to_string(bits.size()) + " of the framed bits");
  }
  return deframe(bits.prefix(*total));
}

}  // namespace detail

namespace {

class DairCoder final : public detail::StepCoder {
 public:
  explicit DairCoder(const CodecConfig& config) : config_(config) {}

  unsigned pool_size() const override { return config_.top_k; }

  std::pair<std::size_t, unsigned> encode(const CandidatePool& pool,
                                          const BitCursor& cursor) override {
    const IntervalTable& table = table_for(pool);
    const Window window = cursor.read_window(config_.spec.alpha);
    const CodeRange& range = table.locate(window.value);
    return {range.pool_index, common_prefix(range.begin, range.end, config_.spec.alpha).length};
  }

  bool decode(const CandidatePool& pool, TokenId token, BitString& out) override {
    const CodeRange* range = table_for(pool).find(token);
    if (range == nullptr) return false;
    const Prefix prefix = common_prefix(range->begin, range->end, config_.spec.alpha);
    out.append(prefix.bits, prefix.length);
    return true;
  }

 private:
  const IntervalTable& table_for(const CandidatePool& pool) {
    return cache_.get(pool, [&](const CandidatePool& p) { return allocate(p, config_.spec); });
  }

  const CodecConfig& config_;
  detail::PoolCache<IntervalTable> cache_;
};

}  // namespace

StegoDocument embed(const LanguageModel& model, const CodecConfig& config, BitCursor cursor) {
  DairCoder coder(config);
  return detail::generate(model, config, kDairEmbedder, config_digest(config), coder,
                          std::move(cursor));
}

std::vector<std::uint8_t> extract(const LanguageModel& model, const CodecConfig& config,
                                  const StegoDocument& doc) {
  DairCoder coder(config);
  return detail::recover(model, config, doc, kDairEmbedder, config_digest(config), coder);
}

}  // namespace dairstega
