#include "dairstega/ngram.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "dairstega/digest.hpp"
#include "dairstega/error.hpp"

namespace dairstega {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint64_t uint(int bytes) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= std::uint64_t{static_cast<unsigned char>(data_[pos_ + i])} << (8 * i);
    }
    pos_ += bytes;
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kBadModelFile, "model file truncated");
  }

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

NGramModel::NGramModel(Vocabulary vocab, unsigned order, double smoothing,
                       std::map<Context, Row> rows)
    : vocab_(std::move(vocab)), order_(order), smoothing_(smoothing), rows_(std::move(rows)) {
  const std::size_t v = vocab_.size();
  std::vector<double> raw(v, smoothing_);
  uniform_ = quantize_renormalize(raw);
  for (const auto& [context, row] : rows_) {
    std::fill(raw.begin(), raw.end(), smoothing_);
    for (const auto& [token, n] : row.counts) raw[token] += static_cast<double>(n);
    cached_.emplace(context, quantize_renormalize(raw));
  }
  id_ = "ngram:" + sha256_hex(serialize()).substr(0, 16) + ":q1e-9";
}

NGramModel NGramModel::train_text(std::string_view corpus, unsigned order, double smoothing) {
  std::istringstream in{std::string(corpus)};
  return train(in, order, smoothing);
}

NGramModel NGramModel::train(std::istream& corpus, unsigned order, double smoothing) {
  if (order < 1 || order > 5) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram order must be in [1, 5]");
  }
  if (!(smoothing > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing constant must be > 0");
  }
  std::vector<std::vector<std::string>> documents;
  std::set<std::string> words;
  std::string line;
  while (std::getline(corpus, line)) {
    auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    for (const auto& t : tokens) {
      if (t != kEosToken && t != kUnkToken) words.insert(t);
    }
    documents.push_back(std::move(tokens));
  }
  if (documents.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no tokens");

  // Reserved tokens take the lowest ids, so probability ties favour <EOS>.
  std::vector<std::string> tokens{std::string(kEosToken), std::string(kUnkToken)};
  tokens.insert(tokens.end(), words.begin(), words.end());
  Vocabulary vocab(std::move(tokens));

  std::map<Context, Row> rows;
  const std::size_t history = order - 1;
  for (const auto& doc : documents) {
    std::vector<TokenId> seq(history, vocab.eos_id());
    for (const auto& w : doc) seq.push_back(vocab.id_of(w));
    seq.push_back(vocab.eos_id());
    for (std::size_t i = history; i < seq.size(); ++i) {
      Row& row = rows[Context(seq.begin() + (i - history), seq.begin() + i)];
      ++row.counts[seq[i]];
      ++row.total;
    }
  }
  return NGramModel(std::move(vocab), order, smoothing, std::move(rows));
}

std::string NGramModel::serialize() const {
  std::string out(kNGramMagic);
  put_u32(out, kNGramFormatVersion);
  put_u32(out, order_);
  put_u64(out, std::bit_cast<std::uint64_t>(smoothing_));
  put_u32(out, static_cast<std::uint32_t>(vocab_.size()));
  for (const auto& t : vocab_.tokens()) {
    put_u32(out, static_cast<std::uint32_t>(t.size()));
    out += t;
  }
  put_u64(out, rows_.size());
  for (const auto& [context, row] : rows_) {
    for (TokenId id : context) put_u32(out, id);
    put_u32(out, static_cast<std::uint32_t>(row.counts.size()));
    for (const auto& [token, n] : row.counts) {
      put_u32(out, token);
      put_u64(out, n);
    }
  }
  return out;
}

void NGramModel::save(std::ostream& out) const {
  const std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed to write model");
}

NGramModel NGramModel::load(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Reader r(buffer.str());
  if (r.bytes(kNGramMagic.size()) != kNGramMagic) {
    throw Error(ErrorCode::kBadModelFile, "not an n-gram model file");
  }
  if (r.uint(4) != kNGramFormatVersion) {
    throw Error(ErrorCode::kBadModelFile, "unsupported model file version");
  }
  const auto order = static_cast<unsigned>(r.uint(4));
  const double smoothing = std::bit_cast<double>(r.uint(8));
  if (order < 1 || order > 5 || !(smoothing > 0.0)) {
    throw Error(ErrorCode::kBadModelFile, "bad model parameters");
  }
  const auto v = r.uint(4);
  std::vector<std::string> tokens;
  tokens.reserve(v);
  for (std::uint64_t i = 0; i < v; ++i) tokens.push_back(r.bytes(r.uint(4)));
  Vocabulary vocab(std::move(tokens));

  std::map<Context, Row> rows;
  const auto n_rows = r.uint(8);
  for (std::uint64_t i = 0; i < n_rows; ++i) {
    Context context(order - 1);
    for (auto& id : context) id = static_cast<TokenId>(r.uint(4));
    Row row;
    const auto n_entries = r.uint(4);
    for (std::uint64_t j = 0; j < n_entries; ++j) {
      const auto token = static_cast<TokenId>(r.uint(4));
      const auto n = r.uint(8);
      if (token >= v) throw Error(ErrorCode::kBadModelFile, "token id out of range");
      row.counts[token] = n;
      row.total += n;
    }
    for (TokenId id : context) {
      if (id >= v) throw Error(ErrorCode::kBadModelFile, "context id out of range");
    }
    rows.emplace(std::move(context), std::move(row));
  }
  if (!r.done()) throw Error(ErrorCode::kBadModelFile, "trailing bytes in model file");
  return NGramModel(std::move(vocab), order, smoothing, std::move(rows));
}

NGramModel NGramModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open model file " + path);
  return load(in);
}

NGramModel::Context NGramModel::key_for(std::span<const TokenId> context) const {
  for (TokenId id : context) {
    if (id >= vocab_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "context id " + std::to_string(id) +
                                                   " outside vocabulary");
    }
  }
  const std::size_t history = order_ - 1;
  Context key(history, vocab_.eos_id());
  const std::size_t take = std::min(history, context.size());
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(),
            key.end() - static_cast<std::ptrdiff_t>(take));
  return key;
}

std::uint64_t NGramModel::count(std::span<const TokenId> context, TokenId next) const {
  auto it = rows_.find(key_for(context));
  if (it == rows_.end()) return 0;
  auto jt = it->second.counts.find(next);
  return jt == it->second.counts.end() ? 0 : jt->second;
}

std::uint64_t NGramModel::context_total(std::span<const TokenId> context) const {
  auto it = rows_.find(key_for(context));
  return it == rows_.end() ? 0 : it->second.total;
}

TokenDistribution NGramModel::next_distribution(std::span<const TokenId> context) const {
  auto it = cached_.find(key_for(context));
  return it == cached_.end() ? uniform_ : it->second;
}

}  // namespace dairstega
