#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "dairstega/baselines.hpp"
#include "dairstega/codec.hpp"
#include "dairstega/constraints.hpp"
#include "dairstega/error.hpp"
#include "dairstega/metrics.hpp"
#include "run_config.hpp"

namespace dairstega::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string model;
  std::string secret;
  std::string stego;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> docs;

  // train
  std::string corpus;
  unsigned order = 2;
  double smoothing = 1.0;

  // validate
  std::optional<std::string> kind;
  std::optional<double> beta;
  std::optional<double> b;
  ConstraintOptions constraints;
};

RunConfig load_config(const Options& o) {
  auto rc = RunConfig::load_file(o.config);
  if (!o.model.empty()) {
    rc.provider.model = o.model;
    rc.provider.corpus.clear();
  }
  if (o.seed) rc.seed = *o.seed;
  if (o.docs) rc.bench.docs = *o.docs;
  return rc;
}

// Dispatches to the configured embedder.
class Embedder {
 public:
  Embedder(const RunConfig& rc, const LanguageModel& model) : rc_(rc), model_(model) {
    codec_ = rc.codec;
    codec_.provider_id = model.id();
  }

  StegoDocument embed(std::span<const std::uint8_t> payload) const {
    BitCursor cursor(frame(payload));
    if (rc_.embedder == "flc") return embed_flc(model_, {codec_, rc_.flc_bits}, std::move(cursor));
    if (rc_.embedder == "hc") return embed_hc(model_, codec_, std::move(cursor));
    return dairstega::embed(model_, codec_, std::move(cursor));
  }

  std::vector<std::uint8_t> extract(const StegoDocument& doc) const {
    if (rc_.embedder == "flc") return extract_flc(model_, {codec_, rc_.flc_bits}, doc);
    if (rc_.embedder == "hc") return extract_hc(model_, codec_, doc);
    return dairstega::extract(model_, codec_, doc);
  }

  std::string digest() const {
    if (rc_.embedder == "flc") return config_digest(FlcConfig{codec_, rc_.flc_bits});
    if (rc_.embedder == "hc") return config_digest_hc(codec_);
    return config_digest(codec_);
  }

  const CodecConfig& codec() const { return codec_; }

 private:
  const RunConfig& rc_;
  const LanguageModel& model_;
  CodecConfig codec_;
};

std::string out_dir(const Options& o, const RunConfig& rc) {
  const std::string dir = o.out.empty() ? rc.out_dir : o.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  return dir;
}

int cmd_train(const Options& o, std::ostream& out) {
  std::ifstream in(o.corpus, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open corpus " + o.corpus);
  const auto model = NGramModel::train(in, o.order, o.smoothing);
  write_file(o.out, model.serialize());
  out << "trained " << model.id() << ": order " << model.order() << ", "
      << model.vocabulary().size() << " tokens -> " << o.out << "\n";
  return kExitOk;
}

int cmd_embed(const Options& o, std::ostream& out) {
  const auto rc = load_config(o);
  const auto secret = read_file(o.secret);
  const Provider provider(rc.provider);
  const Embedder embedder(rc, provider.model());
  const std::vector<std::uint8_t> payload(secret.begin(), secret.end());
  const auto doc = embedder.embed(payload);
  const auto dir = out_dir(o, rc);
  write_file(dir + "/stego.json", doc.to_json());
  write_file(dir + "/stego.txt", doc.text + "\n");
  if (o.format == "text") {
    out << doc.text << "\n";
  } else {
    out << json{{"embedder", doc.embedder},
                {"config_digest", doc.config_digest},
                {"tokens", doc.token_ids.size()},
                {"embedded_bits", doc.embedded_bits},
                {"bpw", measure_bpw(doc)},
                {"stego_json", dir + "/stego.json"},
                {"stego_text", dir + "/stego.txt"}}
               .dump()
        << "\n";
  }
  return kExitOk;
}

int cmd_extract(const Options& o, std::ostream& out) {
  const auto rc = load_config(o);
  const Provider provider(rc.provider);
  const Embedder embedder(rc, provider.model());
  const auto raw = read_file(o.stego);
  const auto first = raw.find_first_not_of(" \t\r\n");
  // A bare stego text carries no metadata; the digest comes from the config.
  const StegoDocument doc =
      first != std::string::npos && raw[first] == '{'
          ? StegoDocument::from_json(raw)
          : document_from_text(provider.model().vocabulary(), raw, embedder.digest(),
                               rc.embedder);
  const auto payload = embedder.extract(doc);
  write_file(o.out, std::string_view(reinterpret_cast<const char*>(payload.data()),
                                     payload.size()));
  out << "recovered " << payload.size() << " bytes -> " << o.out << "\n";
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  AllocationSpec spec;
  if (!o.config.empty()) spec = load_config(o).codec.spec;
  if (o.kind) spec.kind = parse_allocation_kind(*o.kind);
  if (o.beta) spec.beta = *o.beta;
  if (o.b) spec.b = *o.b;
  const auto report = validate_constraints(spec, o.constraints);
  if (o.format == "text") {
    auto line = [&](const char* name, const ConstraintCheck& c) {
      out << name << ": " << (c.pass ? "pass" : "FAIL");
      if (c.first_violation_x) out << " (first violation at x = " << *c.first_violation_x << ")";
      out << "\n";
    };
    out << "allocation " << to_string(spec.kind) << ", beta " << spec.beta << ", x in ["
        << o.constraints.lower << ", " << 1.0 - o.constraints.upper_margin << "]\n";
    line("constraint 1 (growth)", report.growth);
    line("constraint 2 (concavity)", report.concavity);
    line("constraint 3 (f(x) >= x)", report.above_identity);
    line("constraint 3 (f'(x) <= 1)", report.slope_at_most_one);
  } else {
    out << report.to_json() << "\n";
  }
  return kExitOk;
}

// ---- bench ----

struct BenchRow {
  std::string embedder;
  std::string kind;
  std::optional<unsigned> alpha;
  std::optional<double> beta;
  unsigned top_k = 0;
  std::optional<unsigned> flc_bits;
  std::size_t docs = 0;
  std::size_t failures = 0;
  double bpw = 0;
  double ppl = 0;
  double delta_pcs = 0;
  CorpusComparison cmp{};
};

std::vector<std::vector<TokenId>> read_cover(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open cover corpus " + path);
  std::vector<std::vector<TokenId>> docs;
  std::string line;
  while (std::getline(in, line)) {
    auto ids = vocab.tokenize(line);
    if (!ids.empty()) docs.push_back(std::move(ids));
  }
  if (docs.empty()) throw Error(ErrorCode::kConfigError, "cover corpus " + path + " is empty");
  return docs;
}

double mean_perplexity(const LanguageModel& model, std::span<const TokenId> context,
                       const std::vector<std::vector<TokenId>>& docs) {
  double sum = 0;
  for (const auto& d : docs) sum += perplexity(model, context, d);
  return sum / static_cast<double>(docs.size());
}

// Embeds and extracts every payload on a worker pool; codec failures are
// counted, anything else is rethrown.
BenchRow bench_row(const RunConfig& rc, const LanguageModel& model,
                   const std::vector<std::vector<std::uint8_t>>& payloads,
                   const std::vector<std::vector<TokenId>>& cover, double cover_ppl) {
  const Embedder embedder(rc, model);
  const std::size_t n = payloads.size();
  std::vector<std::optional<StegoDocument>> docs(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        auto doc = embedder.embed(payloads[i]);
        if (embedder.extract(doc) == payloads[i]) docs[i] = std::move(doc);
      } catch (const Error& e) {
        if (classify(e.code()) != ErrorClass::kCodec) {
          std::lock_guard lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
        }
      }
    }
  };
  unsigned workers = rc.bench.workers != 0 ? rc.bench.workers
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  BenchRow row;
  row.embedder = rc.embedder;
  row.top_k = rc.embedder == "flc" ? 1u << rc.flc_bits : rc.codec.top_k;
  if (rc.embedder == "flc") row.flc_bits = rc.flc_bits;
  if (rc.embedder == "dair") {
    row.kind = std::string(to_string(rc.codec.spec.kind));
    row.alpha = rc.codec.spec.alpha;
    row.beta = rc.codec.spec.beta;
  }
  row.docs = n;
  const auto context = model.vocabulary().tokenize(rc.codec.instruction);
  std::vector<std::vector<TokenId>> stego;
  for (const auto& d : docs) {
    if (!d) {
      ++row.failures;
      continue;
    }
    row.bpw += measure_bpw(*d);
    row.ppl += perplexity(model, context, d->token_ids);
    stego.push_back(d->token_ids);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (stego.empty()) {
    row.bpw = row.ppl = row.delta_pcs = nan;
    row.cmp = {nan, nan, nan, nan, nan};
    return row;
  }
  row.bpw /= static_cast<double>(stego.size());
  row.ppl /= static_cast<double>(stego.size());
  row.delta_pcs = std::fabs(row.ppl - cover_ppl);
  row.cmp = compare_corpora(cover, stego, model.vocabulary().size());
  return row;
}

const char* const kBenchColumns[] = {"embedder", "kind",  "alpha",     "beta", "top_k", "flc_bits",
                                     "docs",     "failures", "bpw",   "ppl",  "delta_pcs", "cs",
                                     "jsd",      "ed",    "md",        "delta_dp"};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json row_json(const BenchRow& r) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  auto real = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return {{"embedder", r.embedder},     {"kind", r.kind.empty() ? json(nullptr) : json(r.kind)},
          {"alpha", opt(r.alpha)},      {"beta", opt(r.beta)},
          {"top_k", r.top_k},           {"flc_bits", opt(r.flc_bits)},
          {"docs", r.docs},             {"failures", r.failures},
          {"bpw", real(r.bpw)},         {"ppl", real(r.ppl)},
          {"delta_pcs", real(r.delta_pcs)}, {"cs", real(r.cmp.cs)},
          {"jsd", real(r.cmp.jsd)},     {"ed", real(r.cmp.ed)},
          {"md", real(r.cmp.md)},       {"delta_dp", real(r.cmp.delta_dp)}};
}

std::string row_csv(const BenchRow& r) {
  const std::string fields[] = {
      r.embedder,
      r.kind,
      r.alpha ? std::to_string(*r.alpha) : "",
      r.beta ? num(*r.beta) : "",
      std::to_string(r.top_k),
      r.flc_bits ? std::to_string(*r.flc_bits) : "",
      std::to_string(r.docs),
      std::to_string(r.failures),
      num(r.bpw),
      num(r.ppl),
      num(r.delta_pcs),
      num(r.cmp.cs),
      num(r.cmp.jsd),
      num(r.cmp.ed),
      num(r.cmp.md),
      num(r.cmp.delta_dp),
  };
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty() || &f != &fields[0]) line += ',';
    line += f;
  }
  return line;
}

int cmd_bench(const Options& o, std::ostream& out) {
  const auto rc = load_config(o);
  const Provider provider(rc.provider);
  const auto& model = provider.model();
  const std::string cover_path = !rc.bench.cover.empty() ? rc.bench.cover : rc.provider.corpus;
  if (cover_path.empty()) {
    throw Error(ErrorCode::kConfigError, "bench needs bench.cover or provider.corpus");
  }
  const auto cover = read_cover(cover_path, model.vocabulary());
  const double cover_ppl = mean_perplexity(model, {}, cover);

  // The seed only drives payload generation.
  std::mt19937_64 rng(rc.seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::vector<std::uint8_t>> payloads(rc.bench.docs);
  for (auto& p : payloads) {
    p.resize(rc.bench.payload_bytes);
    for (auto& x : p) x = static_cast<std::uint8_t>(byte(rng));
  }

  std::vector<BenchRow> rows;
  for (auto kind : rc.bench.kinds) {
    for (unsigned alpha : rc.bench.alphas) {
      for (double beta : rc.bench.betas) {
        auto v = rc;
        v.embedder = "dair";
        v.codec.spec.kind = kind;
        v.codec.spec.alpha = alpha;
        v.codec.spec.beta = beta;
        v.codec.spec.validate();
        rows.push_back(bench_row(v, model, payloads, cover, cover_ppl));
      }
    }
  }
  for (unsigned bits : rc.bench.flc_bits) {
    auto v = rc;
    v.embedder = "flc";
    v.flc_bits = bits;
    rows.push_back(bench_row(v, model, payloads, cover, cover_ppl));
  }
  for (unsigned top_k : rc.bench.hc_top_k) {
    auto v = rc;
    v.embedder = "hc";
    v.codec.top_k = top_k;
    v.codec.validate();
    rows.push_back(bench_row(v, model, payloads, cover, cover_ppl));
  }

  std::string text;
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    text = json{{"cover_ppl", cover_ppl}, {"seed", rc.seed}, {"rows", arr}}.dump(2) + "\n";
  } else {
    for (const char* c : kBenchColumns) text += std::string(text.empty() ? "" : ",") + c;
    text += "\n";
    for (const auto& r : rows) text += row_csv(r) + "\n";
  }
  out << text;
  if (!o.out.empty()) {
    const auto dir = out_dir(o, rc);
    write_file(dir + (o.format == "json" ? "/bench.json" : "/bench.csv"), text);
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (classify(e.code())) {
    case ErrorClass::kConfig: return kExitConfig;
    case ErrorClass::kProvider: return kExitProvider;
    case ErrorClass::kCodec: return kExitCodec;
  }
  return kExitCodec;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dairstega: interval-allocation text steganography over a word-level LM"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "train an n-gram model from a corpus");
  train->add_option("--corpus", o.corpus, "UTF-8 text, one document per line")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--order", o.order, "n-gram order")->check(CLI::Range(1, 5));
  train->add_option("--smoothing", o.smoothing, "add-k constant");
  train->add_option("--out", o.out, "model file to write")->required();

  auto* embed = app.add_subcommand("embed", "hide a secret file in generated text");
  embed->add_option("--config", o.config, "run configuration (JSON)")->required();
  embed->add_option("--model", o.model, "model file (overrides the config)");
  embed->add_option("--secret", o.secret, "file holding the secret bytes")
      ->required()
      ->check(CLI::ExistingFile);
  embed->add_option("--out", o.out, "directory for stego.json and stego.txt");
  embed->add_option("--format", o.format, "stdout format")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_val("json");

  auto* extract = app.add_subcommand("extract", "recover a secret from a stego");
  extract->add_option("--config", o.config, "run configuration (JSON)")->required();
  extract->add_option("--model", o.model, "model file (overrides the config)");
  extract->add_option("--stego", o.stego, "stego.json, or bare stego text")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--out", o.out, "file for the recovered secret")->required();

  auto* validate = app.add_subcommand("validate", "check an allocation shape against the constraints");
  validate->add_option("--config", o.config, "take the allocation from a run configuration");
  validate->add_option("--kind", o.kind, "linear, sqrt, exp, log or condensed");
  validate->add_option("--beta", o.beta, "exponent (condensed) or slope (linear)");
  validate->add_option("--b", o.b, "log base offset");
  validate->add_option("--lower", o.constraints.lower, "left end of the domain");
  validate->add_option("--margin", o.constraints.upper_margin, "domain ends at 1 - margin");
  validate->add_option("--c", o.constraints.c, "growth constant");
  validate->add_option("--grid", o.constraints.grid_points, "grid points");
  validate->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_val("json");

  auto* bench = app.add_subcommand("bench", "capacity and quality over a config matrix");
  bench->add_option("--config", o.config, "run configuration (JSON)")->required();
  bench->add_option("--model", o.model, "model file (overrides the config)");
  bench->add_option("--out", o.out, "also write bench.csv or bench.json here");
  bench->add_option("--seed", o.seed, "payload seed (overrides the config)");
  bench->add_option("--docs", o.docs, "documents per row (overrides the config)");
  bench->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val("csv");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(o, out);
    if (embed->parsed()) return cmd_embed(o, out);
    if (extract->parsed()) return cmd_extract(o, out);
    if (validate->parsed()) return cmd_validate(o, out);
    return cmd_bench(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dairstega::cli
