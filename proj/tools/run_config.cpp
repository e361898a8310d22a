#include "run_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "dairstega/error.hpp"

namespace dairstega::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

void expect_object(const json& j, const std::string& where,
                   std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + "." + key + " has the wrong type");
  }
}

// Wraps library validation errors so they surface as configuration errors.
template <typename Fn>
auto as_config(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    config_error(where + ": " + e.what());
  }
}

void parse_provider(const json& j, ProviderSettings& p) {
  const std::string where = "provider";
  expect_object(j, where,
                {"model", "corpus", "order", "smoothing", "remote", "remote_model_id", "top_n"});
  take(j, "model", p.model, where);
  take(j, "corpus", p.corpus, where);
  take(j, "order", p.order, where);
  take(j, "smoothing", p.smoothing, where);
  take(j, "remote", p.remote, where);
  take(j, "remote_model_id", p.remote_model_id, where);
  take(j, "top_n", p.top_n, where);
  if (p.model.empty() == p.corpus.empty()) {
    config_error("provider needs exactly one of 'model' or 'corpus'");
  }
}

void parse_allocation(const json& j, AllocationSpec& spec) {
  const std::string where = "codec.allocation";
  expect_object(j, where, {"kind", "alpha", "beta", "b"});
  std::string kind(to_string(spec.kind));
  take(j, "kind", kind, where);
  spec.kind = as_config(where, [&] { return parse_allocation_kind(kind); });
  take(j, "alpha", spec.alpha, where);
  take(j, "beta", spec.beta, where);
  take(j, "b", spec.b, where);
}

void parse_codec(const json& j, RunConfig& rc) {
  const std::string where = "codec";
  expect_object(j, where,
                {"top_k", "allocation", "max_tokens", "eos_policy", "instruction", "embedder",
                 "flc_bits"});
  take(j, "top_k", rc.codec.top_k, where);
  if (j.contains("allocation")) parse_allocation(j.at("allocation"), rc.codec.spec);
  take(j, "max_tokens", rc.codec.max_tokens, where);
  std::string eos(to_string(rc.codec.eos_policy));
  take(j, "eos_policy", eos, where);
  rc.codec.eos_policy = as_config(where, [&] { return parse_eos_policy(eos); });
  take(j, "instruction", rc.codec.instruction, where);
  take(j, "embedder", rc.embedder, where);
  take(j, "flc_bits", rc.flc_bits, where);
  if (rc.embedder != "dair" && rc.embedder != "flc" && rc.embedder != "hc") {
    config_error("codec.embedder must be one of dair, flc, hc");
  }
}

void parse_bench(const json& j, BenchSettings& b) {
  const std::string where = "bench";
  expect_object(j, where,
                {"docs", "payload_bytes", "kinds", "alphas", "betas", "flc_bits", "hc_top_k",
                 "cover", "workers"});
  take(j, "docs", b.docs, where);
  take(j, "payload_bytes", b.payload_bytes, where);
  if (j.contains("kinds")) {
    std::vector<std::string> names;
    take(j, "kinds", names, where);
    b.kinds.clear();
    for (const auto& n : names) {
      b.kinds.push_back(as_config(where, [&] { return parse_allocation_kind(n); }));
    }
  }
  take(j, "alphas", b.alphas, where);
  take(j, "betas", b.betas, where);
  take(j, "flc_bits", b.flc_bits, where);
  take(j, "hc_top_k", b.hc_top_k, where);
  take(j, "cover", b.cover, where);
  take(j, "workers", b.workers, where);
  if (b.docs == 0) config_error("bench.docs must be positive");
}

}  // namespace

RunConfig RunConfig::parse(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc;
  expect_object(j, "config", {"provider", "codec", "bench", "seed", "out_dir"});
  if (!j.contains("provider")) config_error("config needs a 'provider' object");
  parse_provider(j.at("provider"), rc.provider);
  if (j.contains("codec")) parse_codec(j.at("codec"), rc);
  if (j.contains("bench")) parse_bench(j.at("bench"), rc.bench);
  take(j, "seed", rc.seed, "config");
  take(j, "out_dir", rc.out_dir, "config");

  // The provider id is filled in once the model is loaded.
  auto probe = rc.codec;
  probe.provider_id = "unset";
  as_config("codec", [&] {
    probe.validate();
    return 0;
  });
  if (rc.flc_bits < 1 || rc.flc_bits > 8) config_error("codec.flc_bits must be in [1, 8]");
  return rc;
}

RunConfig RunConfig::load_file(const std::string& path) {
  auto rc = parse(read_file(path));
  // Relative paths are taken from the config file's directory.
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&rc.provider.model, &rc.provider.corpus, &rc.bench.cover, &rc.out_dir}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  }
  return rc;
}

Provider::Provider(const ProviderSettings& settings) {
  if (!settings.model.empty()) {
    std::ifstream in(settings.model, std::ios::binary);
    if (!in) throw Error(ErrorCode::kBadModelFile, "cannot open model file " + settings.model);
    local_ = std::make_unique<NGramModel>(NGramModel::load(in));
  } else {
    std::ifstream in(settings.corpus, std::ios::binary);
    if (!in) throw Error(ErrorCode::kEmptyCorpus, "cannot open corpus " + settings.corpus);
    local_ = std::make_unique<NGramModel>(
        NGramModel::train(in, settings.order, settings.smoothing));
  }
  std::string endpoint = settings.remote;
  if (const char* env = std::getenv(kRemoteEnv); env != nullptr && *env != '\0') endpoint = env;
  if (!endpoint.empty()) {
    remote_ = std::make_unique<RemoteModel>(endpoint, local_->vocabulary(),
                                            settings.remote_model_id, settings.top_n);
  }
}

const LanguageModel& Provider::model() const {
  if (remote_) return *remote_;
  return *local_;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path);
}

}  // namespace dairstega::cli
