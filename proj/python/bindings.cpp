#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "dairstega/allocation.hpp"
#include "dairstega/baselines.hpp"
#include "dairstega/bitstream.hpp"
#include "dairstega/codec.hpp"
#include "dairstega/constraints.hpp"
#include "dairstega/error.hpp"
#include "dairstega/metrics.hpp"
#include "dairstega/ngram.hpp"
#include "dairstega/remote.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace dairstega;

namespace {

std::vector<std::uint8_t> to_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::bytes from_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

py::list ranges_of(const IntervalTable& table) {
  py::list out;
  for (const auto& r : table.ranges()) {
    out.append(py::dict("token"_a = r.token, "pool_index"_a = r.pool_index, "begin"_a = r.begin,
                        "end"_a = r.end));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interval-allocation text steganography over word-level language models";
  m.attr("GRID_UNITS") = kGridUnits;
  m.attr("FRAME_HEADER_BITS") = kFrameHeaderBits;

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "DairstegaError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // Raised as an instance so callers can branch on .code.
      const py::object& type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      py::set_error(type, exc);
    }
  });

  // ---- bitstream ----
  m.def(
      "frame", [](const py::bytes& payload) { return frame(to_bytes(payload)).bits().to_string(); },
      "payload"_a, "Framed bitstream as a string of '0'/'1'.");
  m.def(
      "deframe",
      [](const std::string& bits) { return from_bytes(deframe(BitString::from_string(bits))); },
      "bits"_a);

  // ---- models ----
  py::class_<LanguageModel>(m, "LanguageModel")
      .def_property_readonly("id", &LanguageModel::id)
      .def_property_readonly("tokens",
                             [](const LanguageModel& lm) { return lm.vocabulary().tokens(); })
      .def("tokenize",
           [](const LanguageModel& lm, const std::string& text) {
             return lm.vocabulary().tokenize(text);
           })
      .def("detokenize",
           [](const LanguageModel& lm, const std::vector<TokenId>& ids) {
             return lm.vocabulary().detokenize(ids);
           })
      .def(
          "next_distribution",
          [](const LanguageModel& lm, const std::vector<TokenId>& context) {
            return lm.next_distribution(context).all_units();
          },
          "context"_a, "Next-token probabilities in 1e-9 units, indexed by token id.");

  py::class_<NGramModel, LanguageModel>(m, "NGramModel")
      .def_static("train_text", &NGramModel::train_text, "corpus"_a, "order"_a = 2,
                  "smoothing"_a = 1.0)
      .def_static(
          "train_file",
          [](const std::string& path, unsigned order, double smoothing) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
            return NGramModel::train(in, order, smoothing);
          },
          "path"_a, "order"_a = 2, "smoothing"_a = 1.0)
      .def_static("load", &NGramModel::load_file, "path"_a)
      .def_static(
          "from_bytes",
          [](const py::bytes& data) {
            std::istringstream in(std::string(data), std::ios::binary);
            return NGramModel::load(in);
          },
          "data"_a)
      .def("to_bytes", [](const NGramModel& model) { return py::bytes(model.serialize()); })
      .def_property_readonly("order", &NGramModel::order)
      .def_property_readonly("smoothing", &NGramModel::smoothing);

  py::class_<RemoteModel, LanguageModel>(m, "RemoteModel")
      .def(py::init([](const std::string& endpoint, const LanguageModel& vocab_source,
                       const std::string& model_id, unsigned top_n) {
             return std::make_unique<RemoteModel>(endpoint, vocab_source.vocabulary(), model_id,
                                                  top_n);
           }),
           "endpoint"_a, "vocabulary_from"_a, "model_id"_a, "top_n"_a = 64);

  // ---- allocation ----
  py::enum_<AllocationKind>(m, "AllocationKind")
      .value("LINEAR", AllocationKind::kLinear)
      .value("SQRT", AllocationKind::kSqrt)
      .value("EXP", AllocationKind::kExp)
      .value("LOG", AllocationKind::kLog)
      .value("CONDENSED", AllocationKind::kCondensed);

  py::class_<AllocationSpec>(m, "AllocationSpec")
      .def(py::init([](const std::string& kind, unsigned alpha, double beta, double b) {
             AllocationSpec s{parse_allocation_kind(kind), alpha, beta, b};
             s.validate();
             return s;
           }),
           "kind"_a = "condensed", "alpha"_a = 8, "beta"_a = 1.0, "b"_a = 2.0)
      .def(py::init([](AllocationKind kind, unsigned alpha, double beta, double b) {
             AllocationSpec s{kind, alpha, beta, b};
             s.validate();
             return s;
           }),
           "kind"_a, "alpha"_a = 8, "beta"_a = 1.0, "b"_a = 2.0)
      .def_readwrite("kind", &AllocationSpec::kind)
      .def_readwrite("alpha", &AllocationSpec::alpha)
      .def_readwrite("beta", &AllocationSpec::beta)
      .def_readwrite("b", &AllocationSpec::b)
      .def("__repr__", [](const AllocationSpec& s) {
        std::ostringstream os;
        os << "AllocationSpec(kind='" << to_string(s.kind) << "', alpha=" << s.alpha
           << ", beta=" << s.beta << ", b=" << s.b << ")";
        return os.str();
      });

  m.def(
      "apportion",
      [](const std::vector<std::uint64_t>& weights, std::uint64_t total) {
        return apportion(std::span<const std::uint64_t>(weights), total);
      },
      "weights"_a, "total"_a, "Largest-remainder counts with every entry given at least one.");
  m.def(
      "allocate",
      [](const std::vector<std::uint64_t>& probs_units, const AllocationSpec& spec) {
        std::vector<PoolEntry> entries;
        const auto units = quantize_units(probs_units);
        for (std::size_t i = 0; i < units.size(); ++i) {
          if (units[i] > 0) entries.push_back({static_cast<TokenId>(i), units[i]});
        }
        std::stable_sort(entries.begin(), entries.end(),
                         [](const PoolEntry& a, const PoolEntry& b) { return a.units > b.units; });
        return ranges_of(
            allocate(renormalize_candidates(entries, static_cast<unsigned>(entries.size())),
                     spec));
      },
      "weights"_a, "spec"_a,
      "Code ranges for a pool built from raw nonnegative weights (index = token id).");
  m.def(
      "common_prefix",
      [](std::uint64_t begin, std::uint64_t end, unsigned alpha) {
        return common_prefix(begin, end, alpha).to_string();
      },
      "begin"_a, "end"_a, "alpha"_a);
  m.def(
      "validate_constraints",
      [](const AllocationSpec& spec, double lower, double upper_margin, double c,
         std::size_t grid_points) {
        ConstraintOptions o;
        o.lower = lower;
        o.upper_margin = upper_margin;
        o.c = c;
        o.grid_points = grid_points;
        return py::module_::import("json").attr("loads")(validate_constraints(spec, o).to_json());
      },
      "spec"_a, "lower"_a = 0.1, "upper_margin"_a = 0.1, "c"_a = 0.05, "grid_points"_a = 81);

  // ---- codec ----
  py::class_<CodecConfig>(m, "CodecConfig")
      .def(py::init([](const LanguageModel& model, const AllocationSpec& spec, unsigned top_k,
                       std::size_t max_tokens, const std::string& eos_policy,
                       const std::string& instruction) {
             CodecConfig c;
             c.provider_id = model.id();
             c.spec = spec;
             c.top_k = top_k;
             c.max_tokens = max_tokens;
             c.eos_policy = parse_eos_policy(eos_policy);
             c.instruction = instruction;
             c.validate();
             return c;
           }),
           "model"_a, "spec"_a = AllocationSpec{}, "top_k"_a = 16, "max_tokens"_a = 1024,
           "eos_policy"_a = "suppress_until_done", "instruction"_a = "")
      .def_readwrite("provider_id", &CodecConfig::provider_id)
      .def_readwrite("top_k", &CodecConfig::top_k)
      .def_readwrite("spec", &CodecConfig::spec)
      .def_readwrite("max_tokens", &CodecConfig::max_tokens)
      .def_readwrite("instruction", &CodecConfig::instruction)
      .def_property_readonly("digest", [](const CodecConfig& c) { return config_digest(c); });

  py::class_<StegoDocument>(m, "StegoDocument")
      .def_readonly("embedder", &StegoDocument::embedder)
      .def_readonly("config_digest", &StegoDocument::config_digest)
      .def_readonly("token_ids", &StegoDocument::token_ids)
      .def_readonly("text", &StegoDocument::text)
      .def_readonly("steps", &StegoDocument::steps)
      .def_readonly("embedded_bits", &StegoDocument::embedded_bits)
      .def_property_readonly("bpw", &measure_bpw)
      .def("to_json", &StegoDocument::to_json)
      .def_static("from_json", &StegoDocument::from_json, "text"_a)
      .def("__repr__", [](const StegoDocument& d) {
        return "StegoDocument(embedder='" + d.embedder + "', tokens=" +
               std::to_string(d.token_ids.size()) +
               ", embedded_bits=" + std::to_string(d.embedded_bits) + ")";
      });
  m.def(
      "document_from_text",
      [](const LanguageModel& model, const std::string& text, const std::string& digest,
         const std::string& embedder) {
        return document_from_text(model.vocabulary(), text, digest, embedder);
      },
      "model"_a, "text"_a, "digest"_a, "embedder"_a = std::string(kDairEmbedder),
      "Rebuilds a document from bare stego text.");

  m.def(
      "embed",
      [](const LanguageModel& model, const CodecConfig& config, const py::bytes& payload) {
        const auto bytes = to_bytes(payload);
        py::gil_scoped_release unlock;
        return embed(model, config, BitCursor(frame(bytes)));
      },
      "model"_a, "config"_a, "payload"_a);
  m.def(
      "extract",
      [](const LanguageModel& model, const CodecConfig& config, const StegoDocument& doc) {
        std::vector<std::uint8_t> out;
        {
          py::gil_scoped_release unlock;
          out = extract(model, config, doc);
        }
        return from_bytes(out);
      },
      "model"_a, "config"_a, "doc"_a);

  m.def(
      "embed_flc",
      [](const LanguageModel& model, const CodecConfig& config, unsigned bits,
         const py::bytes& payload) {
        return embed_flc(model, FlcConfig{config, bits}, BitCursor(frame(to_bytes(payload))));
      },
      "model"_a, "config"_a, "bits_per_step"_a, "payload"_a);
  m.def(
      "extract_flc",
      [](const LanguageModel& model, const CodecConfig& config, unsigned bits,
         const StegoDocument& doc) {
        return from_bytes(extract_flc(model, FlcConfig{config, bits}, doc));
      },
      "model"_a, "config"_a, "bits_per_step"_a, "doc"_a);
  m.def(
      "embed_hc",
      [](const LanguageModel& model, const CodecConfig& config, const py::bytes& payload) {
        return embed_hc(model, config, BitCursor(frame(to_bytes(payload))));
      },
      "model"_a, "config"_a, "payload"_a);
  m.def(
      "extract_hc",
      [](const LanguageModel& model, const CodecConfig& config, const StegoDocument& doc) {
        return from_bytes(extract_hc(model, config, doc));
      },
      "model"_a, "config"_a, "doc"_a);

  // ---- metrics ----
  using Vec = std::vector<double>;
  m.def("cosine_similarity", [](const Vec& u, const Vec& v) { return cosine_similarity(u, v); });
  m.def("jsd", [](const Vec& u, const Vec& v) { return jsd(u, v); });
  m.def("euclidean", [](const Vec& u, const Vec& v) { return euclidean(u, v); });
  m.def("manhattan", [](const Vec& u, const Vec& v) { return manhattan(u, v); });
  m.def("dot_product_diff", [](const Vec& u, const Vec& v) { return dot_product_diff(u, v); });
  m.def(
      "perplexity",
      [](const LanguageModel& model, const std::vector<TokenId>& context,
         const std::vector<TokenId>& tokens) { return perplexity(model, context, tokens); },
      "model"_a, "context"_a, "tokens"_a);
  m.def(
      "compare_corpora",
      [](const std::vector<std::vector<TokenId>>& cover,
         const std::vector<std::vector<TokenId>>& stego, std::size_t vocab_size) {
        const auto c = compare_corpora(cover, stego, vocab_size);
        return py::dict("cs"_a = c.cs, "jsd"_a = c.jsd, "ed"_a = c.ed, "md"_a = c.md,
                        "delta_dp"_a = c.delta_dp);
      },
      "cover"_a, "stego"_a, "vocab_size"_a);
}
