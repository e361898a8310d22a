#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dairstega/baselines.hpp"
#include "dairstega/error.hpp"
#include "test_support.hpp"

using namespace dairstega;
using testing::toy_config;
using testing::toy_model;

namespace {

FlcConfig flc_config(unsigned bits) {
  return {toy_config(AllocationKind::kCondensed, 8, 1.0, 16), bits};
}

// Minimal expected code length over all full binary trees, by brute-force
// merging of every pair (small alphabets only).
std::uint64_t best_cost(std::vector<std::uint64_t> w) {
  if (w.size() == 1) return 0;
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      std::vector<std::uint64_t> next;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k != i && k != j) next.push_back(w[k]);
      }
      next.push_back(w[i] + w[j]);
      best = std::min(best, w[i] + w[j] + best_cost(next));
    }
  }
  return best;
}

bool prefix_free(const HuffmanTable& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (i == j) continue;
      const auto& a = t.code(i);
      const auto& b = t.code(j);
      if (a.size() <= b.size() && b.prefix(a.size()) == a) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("FLC indexes the pool directly") {
  const auto config = flc_config(1);
  const auto& vocab = toy_model().vocabulary();
  const auto doc = embed_flc(toy_model(), config, BitCursor(BitString::from_string("10")));
  REQUIRE(doc.token_ids.size() >= 2);
  auto context = vocab.tokenize(config.codec.instruction);
  const std::vector<TokenId> excluded{vocab.unk_id(), vocab.eos_id()};
  const auto first = select_candidates(toy_model().next_distribution(context), 2, excluded);
  CHECK(doc.token_ids[0] == first[1].token);
  context.push_back(doc.token_ids[0]);
  const auto second = select_candidates(toy_model().next_distribution(context), 2, excluded);
  CHECK(doc.token_ids[1] == second[0].token);
  CHECK(doc.embedded_bits == 2);
}

TEST_CASE("FLC rate is exactly b bits per word without padding") {
  for (unsigned b : {1u, 2u, 3u}) {
    auto config = flc_config(b);
    // 48 + 96 = 144 bits, divisible by 1, 2 and 3.
    const auto payload = testing::bytes_of("twelve bytes");
    config.codec.max_tokens = 144 / b;
    const auto doc = embed_flc(toy_model(), config, BitCursor(frame(payload)));
    CHECK(doc.token_ids.size() == 144 / b);
    CHECK(measure_bpw(doc) == doctest::Approx(static_cast<double>(b)));
    CHECK(extract_flc(toy_model(), config, doc) == payload);
  }
}

TEST_CASE("FLC and Huffman round trips") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 12; ++t) {
    const auto payload = testing::random_payload(rng, 0, 48);
    const auto flc = flc_config(1 + t % 3);
    CHECK(extract_flc(toy_model(), flc, embed_flc(toy_model(), flc, BitCursor(frame(payload)))) ==
          payload);
    const auto hc = toy_config(AllocationKind::kCondensed, 8, 1.0, 2 + t % 15);
    CHECK(extract_hc(toy_model(), hc, embed_hc(toy_model(), hc, BitCursor(frame(payload)))) ==
          payload);
  }
}

TEST_CASE("baseline documents are not interchangeable") {
  const auto payload = testing::bytes_of("Love and peace");
  const auto flc = flc_config(2);
  const auto doc = embed_flc(toy_model(), flc, BitCursor(frame(payload)));
  CHECK_THROWS_AS(extract_hc(toy_model(), flc.codec, doc), Error);
  CHECK_THROWS_AS(extract_flc(toy_model(), flc_config(1), doc), Error);
  CHECK_THROWS_AS((FlcConfig{flc.codec, 9}.validate()), Error);
}

TEST_CASE("Huffman code lengths") {
  SUBCASE("uniform pool of four") {
    const std::vector<std::uint32_t> w{250'000'000, 250'000'000, 250'000'000, 250'000'000};
    CHECK(HuffmanTable(w).lengths() == std::vector<unsigned>{2, 2, 2, 2});
  }
  SUBCASE("half, quarter, quarter") {
    const std::vector<std::uint32_t> w{500'000'000, 250'000'000, 250'000'000};
    const HuffmanTable t(w);
    CHECK(t.lengths() == std::vector<unsigned>{1, 2, 2});
    CHECK(prefix_free(t));
  }
  SUBCASE("single symbol") {
    const std::vector<std::uint32_t> w{7};
    CHECK(HuffmanTable(w).lengths() == std::vector<unsigned>{0});
  }
}

TEST_CASE("property: Huffman codes are prefix-free and optimal") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<std::uint32_t> w(n);
    for (auto& x : w) x = 1 + static_cast<std::uint32_t>(rng() % 50);
    std::sort(w.rbegin(), w.rend());
    const HuffmanTable t(w);
    REQUIRE(prefix_free(t));
    std::uint64_t cost = 0;
    for (std::size_t i = 0; i < n; ++i) cost += std::uint64_t{w[i]} * t.code(i).size();
    CHECK(cost == best_cost({w.begin(), w.end()}));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& code = t.code(i);
      const auto [leaf, depth] = t.walk([&](unsigned d) { return code[d]; });
      CHECK(leaf == i);
      CHECK(depth == code.size());
    }
  }
}
