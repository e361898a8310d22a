#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "dairstega/distribution.hpp"

namespace httplib {
class Client;
}

namespace dairstega {

inline constexpr std::string_view kNextDistributionPath = "/v1/next_distribution";

// Client for an inference server speaking the next-distribution protocol:
//   POST /v1/next_distribution  {"context_ids":[...],"top_n":K}
//   -> {"entries":[[token_id, units],...],"residual":units}
// with probabilities in 1e-9 units. Tokens outside the returned top-N get
// zero probability; their mass is the residual bucket.
class RemoteModel final : public LanguageModel {
 public:
  RemoteModel(std::string endpoint, Vocabulary vocab, std::string model_id, unsigned top_n);
  ~RemoteModel() override;

  const Vocabulary& vocabulary() const override { return vocab_; }
  TokenDistribution next_distribution(std::span<const TokenId> context) const override;
  std::string id() const override { return "remote:" + model_id_; }

  unsigned top_n() const noexcept { return top_n_; }

 private:
  std::string endpoint_;
  Vocabulary vocab_;
  std::string model_id_;
  unsigned top_n_;
  mutable std::mutex mutex_;
  std::unique_ptr<httplib::Client> client_;
};

// Server-side handler: answers one request body against a local model.
// Throws ProtocolError on malformed requests.
std::string answer_next_distribution(const LanguageModel& model, std::string_view request_body);

// Parses a response body into a dense distribution over `vocab_size` ids.
TokenDistribution parse_next_distribution(std::string_view response_body,
                                          std::size_t vocab_size);

}  // namespace dairstega
