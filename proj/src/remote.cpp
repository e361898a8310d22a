#include "dairstega/remote.hpp"

#include <algorithm>
#include <numeric>

#include <httplib.h>
#include <json.hpp>

#include "dairstega/error.hpp"

namespace dairstega {

using nlohmann::json;

RemoteModel::RemoteModel(std::string endpoint, Vocabulary vocab, std::string model_id,
                         unsigned top_n)
    : endpoint_(std::move(endpoint)),
      vocab_(std::move(vocab)),
      model_id_(std::move(model_id)),
      top_n_(top_n) {
  if (top_n_ == 0) throw Error(ErrorCode::kInvalidArgument, "top_n must be positive");
  client_ = std::make_unique<httplib::Client>(endpoint_);
  client_->set_keep_alive(true);
  client_->set_tcp_nodelay(true);
  client_->set_connection_timeout(5);
  client_->set_read_timeout(30);
}

RemoteModel::~RemoteModel() = default;

TokenDistribution RemoteModel::next_distribution(std::span<const TokenId> context) const {
  json request = {{"context_ids", std::vector<TokenId>(context.begin(), context.end())},
                  {"top_n", top_n_}};
  httplib::Result result;
  {
    std::lock_guard lock(mutex_);
    result = client_->Post(std::string(kNextDistributionPath), request.dump(),
                           "application/json");
  }
  if (!result) {
    throw Error(ErrorCode::kRemoteUnavailable,
                endpoint_ + ": " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kProtocolError,
                "server answered HTTP " + std::to_string(result->status));
  }
  return parse_next_distribution(result->body, vocab_.size());
}

std::string answer_next_distribution(const LanguageModel& model, std::string_view request_body) {
  std::vector<TokenId> context;
  std::size_t top_n = 0;
  try {
    const json request = json::parse(request_body);
    context = request.at("context_ids").get<std::vector<TokenId>>();
    top_n = request.at("top_n").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError, std::string("bad request: ") + e.what());
  }
  const TokenDistribution dist = model.next_distribution(context);

  std::vector<TokenId> order(dist.size());
  std::iota(order.begin(), order.end(), TokenId{0});
  top_n = std::min(top_n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_n),
                    order.end(), [&](TokenId a, TokenId b) {
                      return dist.units(a) != dist.units(b) ? dist.units(a) > dist.units(b)
                                                            : a < b;
                    });
  json entries = json::array();
  std::uint64_t listed = 0;
  for (std::size_t i = 0; i < top_n; ++i) {
    entries.push_back({order[i], dist.units(order[i])});
    listed += dist.units(order[i]);
  }
  return json{{"entries", std::move(entries)}, {"residual", kGridUnits - listed}}.dump();
}

TokenDistribution parse_next_distribution(std::string_view response_body,
                                          std::size_t vocab_size) {
  std::vector<std::uint32_t> units(vocab_size, 0);
  std::uint64_t residual = 0;
  try {
    const json response = json::parse(response_body);
    for (const auto& entry : response.at("entries")) {
      const auto id = entry.at(0).get<std::uint64_t>();
      const auto u = entry.at(1).get<std::uint64_t>();
      if (id >= vocab_size) throw Error(ErrorCode::kProtocolError, "token id outside vocabulary");
      if (u > kGridUnits || units[id] != 0) {
        throw Error(ErrorCode::kProtocolError, "bad entry for token " + std::to_string(id));
      }
      units[id] = static_cast<std::uint32_t>(u);
    }
    residual = response.at("residual").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocolError, std::string("bad response: ") + e.what());
  }
  const std::uint64_t sum = std::accumulate(units.begin(), units.end(), residual);
  if (sum != kGridUnits) {
    throw Error(ErrorCode::kProtocolError,
                "response mass is " + std::to_string(sum) + " units, expected 1e9");
  }
  return TokenDistribution(std::move(units), static_cast<std::uint32_t>(residual));
}

}  // namespace dairstega
