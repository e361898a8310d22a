#include <doctest.h>

#include <cmath>
#include <random>

#include "dairstega/error.hpp"
#include "dairstega/metrics.hpp"
#include "dairstega/ngram.hpp"

using namespace dairstega;

namespace {

class UniformModel final : public LanguageModel {
 public:
  UniformModel() : vocab_({"a", "b", "c", "d", "e", "<EOS>", "<UNK>"}) {}
  const Vocabulary& vocabulary() const override { return vocab_; }
  TokenDistribution next_distribution(std::span<const TokenId>) const override {
    return quantize_renormalize(std::vector<double>(vocab_.size(), 1.0));
  }
  std::string id() const override { return "uniform"; }

 private:
  Vocabulary vocab_;
};

class PeakedModel final : public LanguageModel {
 public:
  PeakedModel() : vocab_({"a", "<EOS>", "<UNK>"}) {}
  const Vocabulary& vocabulary() const override { return vocab_; }
  TokenDistribution next_distribution(std::span<const TokenId>) const override {
    return TokenDistribution({kGridUnits - 2, 1, 1});
  }
  std::string id() const override { return "peaked"; }

 private:
  Vocabulary vocab_;
};

double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("frequency vectors") {
  const std::vector<std::vector<TokenId>> corpus{{0, 0, 1}};
  const auto v = frequency_vector(corpus, 3);
  CHECK(v[0] == doctest::Approx(2.0 / 3.0));
  CHECK(v[1] == doctest::Approx(1.0 / 3.0));
  CHECK(v[2] == 0.0);
  const std::vector<std::vector<TokenId>> one{{2}};
  CHECK(frequency_vector(one, 3) == std::vector<double>{0, 0, 1});
  const std::vector<std::vector<TokenId>> empty{{}};
  CHECK_THROWS_AS(frequency_vector(empty, 3), Error);
}

TEST_CASE("identical vectors") {
  const std::vector<double> u{0.2, 0.3, 0.5};
  CHECK(cosine_similarity(u, u) == doctest::Approx(100.0));
  CHECK(jsd(u, u) == 0.0);
  CHECK(euclidean(u, u) == 0.0);
  CHECK(manhattan(u, u) == 0.0);
  CHECK(dot_product_diff(u, u) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthogonal extremes") {
  const std::vector<double> u{1, 0};
  const std::vector<double> v{0, 1};
  CHECK(cosine_similarity(u, v) == 0.0);
  CHECK(euclidean(u, v) == doctest::Approx(std::sqrt(2.0)));
  CHECK(manhattan(u, v) == 2.0);
  CHECK(jsd(u, v) == doctest::Approx(100.0));
  CHECK(dot_product_diff(u, v) == 100.0);
}

TEST_CASE("JSD matches the entropy form") {
  const std::vector<double> u{0.5, 0.5};
  const std::vector<double> v{0.75, 0.25};
  const std::vector<double> m{0.625, 0.375};
  auto h = [](const std::vector<double>& p) {
    double s = 0;
    for (double x : p) if (x > 0) s -= x * std::log2(x);
    return s;
  };
  const double entropy_form = 100.0 * (h(m) - 0.5 * (h(u) + h(v)));
  const double kl_form = 100.0 * 0.5 * (kl(u, m) + kl(v, m));
  CHECK(std::fabs(jsd(u, v) - entropy_form) < 1e-12);
  CHECK(std::fabs(jsd(u, v) - kl_form) < 1e-12);
}

TEST_CASE("property: metrics are symmetric") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> u(10), v(10);
    for (auto& x : u) x = r(rng);
    for (auto& x : v) x = r(rng);
    CHECK(cosine_similarity(u, v) == doctest::Approx(cosine_similarity(v, u)));
    CHECK(jsd(u, v) == doctest::Approx(jsd(v, u)));
    CHECK(euclidean(u, v) == euclidean(v, u));
    CHECK(manhattan(u, v) == manhattan(v, u));
  }
}

TEST_CASE("metric errors") {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{1, 2, 3};
  const std::vector<double> z{0, 0};
  CHECK_THROWS_AS(cosine_similarity(a, b), Error);
  CHECK_THROWS_AS(jsd(a, b), Error);
  CHECK_THROWS_AS(euclidean(a, b), Error);
  CHECK_THROWS_AS(manhattan(a, b), Error);
  CHECK_THROWS_AS(cosine_similarity(a, z), Error);
}

TEST_CASE("perplexity") {
  SUBCASE("uniform model gives the vocabulary size") {
    UniformModel model;
    const std::vector<TokenId> seq{0, 3, 1, 4, 4};
    CHECK(perplexity(model, {}, seq) == doctest::Approx(7.0).epsilon(1e-8));
  }
  SUBCASE("near one-hot model gives one") {
    PeakedModel model;
    const std::vector<TokenId> seq(50, 0);
    CHECK(std::fabs(perplexity(model, {}, seq) - 1.0) < 1e-6);
  }
  SUBCASE("empty sequence") {
    UniformModel model;
    CHECK_THROWS_AS(perplexity(model, {}, {}), Error);
  }
}

TEST_CASE("compare_corpora") {
  const std::vector<std::vector<TokenId>> a{{0, 1, 1}, {2}};
  const auto same = compare_corpora(a, a, 3);
  CHECK(same.cs == doctest::Approx(100.0));
  CHECK(same.ed == 0.0);
  CHECK(same.delta_dp == doctest::Approx(0.0).epsilon(1e-12));
}
