#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dairstega/allocation.hpp"
#include "dairstega/codec.hpp"
#include "dairstega/ngram.hpp"
#include "dairstega/remote.hpp"

namespace dairstega::cli {

inline constexpr const char* kRemoteEnv = "DAIRSTEGA_REMOTE";

struct ProviderSettings {
  std::string model;   // trained n-gram file
  std::string corpus;  // or train one on the fly
  unsigned order = 2;
  double smoothing = 1.0;
  std::string remote;  // endpoint; the vocabulary still comes from the local model
  std::string remote_model_id = "remote";
  unsigned top_n = 64;
};

struct BenchSettings {
  std::size_t docs = 50;
  std::size_t payload_bytes = 32;
  std::vector<AllocationKind> kinds{AllocationKind::kCondensed};
  std::vector<unsigned> alphas{8, 32};
  std::vector<double> betas{1.0, 0.5};
  std::vector<unsigned> flc_bits{1};
  std::vector<unsigned> hc_top_k{2};
  std::string cover;  // defaults to provider.corpus
  unsigned workers = 0;  // 0: one per hardware thread
};

// JSON run configuration. Every object rejects keys it does not know.
//
// {
//   "provider": {"model": "toy.ngram"},
//   "codec": {"top_k": 16, "allocation": {"kind": "condensed", "alpha": 8, "beta": 1.0},
//             "max_tokens": 1024, "eos_policy": "suppress_until_done",
//             "instruction": "fox meets", "embedder": "dair", "flc_bits": 1},
//   "bench": {"docs": 50, "alphas": [8, 32], "betas": [1.0, 0.5]},
//   "seed": 1,
//   "out_dir": "out"
// }
struct RunConfig {
  ProviderSettings provider;
  CodecConfig codec;
  std::string embedder = "dair";
  unsigned flc_bits = 1;
  BenchSettings bench;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  // Throws ConfigError. load_file resolves relative paths against the
  // directory holding the file.
  static RunConfig parse(std::string_view json_text);
  static RunConfig load_file(const std::string& path);
};

// The loaded provider. A remote provider borrows the local vocabulary.
class Provider {
 public:
  // DAIRSTEGA_REMOTE, when set, replaces settings.remote.
  explicit Provider(const ProviderSettings& settings);
  const LanguageModel& model() const;
  const NGramModel& local() const { return *local_; }

 private:
  std::unique_ptr<NGramModel> local_;
  std::unique_ptr<RemoteModel> remote_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

}  // namespace dairstega::cli
