#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dairstega/allocation.hpp"
#include "dairstega/constraints.hpp"
#include "dairstega/error.hpp"
#include "oracles.hpp"

using namespace dairstega;
using testing::oracle_apportion;
using testing::oracle_prefix;

namespace {

CandidatePool pool_of(std::vector<std::uint32_t> units) {
  CandidatePool pool;
  pool.top_k = static_cast<unsigned>(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    pool.entries.push_back({static_cast<TokenId>(i), units[i]});
  }
  return pool;
}

}  // namespace

TEST_CASE("build_pool orders by probability then id and renormalizes") {
  const TokenDistribution dist({100'000'000, 400'000'000, 100'000'000, 0, 400'000'000});
  const auto pool = build_pool(dist, 3);
  REQUIRE(pool.effective_size() == 3);
  CHECK(pool.entries[0].token == 1);
  CHECK(pool.entries[1].token == 4);
  CHECK(pool.entries[2].token == 0);
  // 0.4/0.9, 0.4/0.9, 0.1/0.9 floored; leftover to the first entry.
  CHECK(pool.entries[0].units == 444'444'445);
  CHECK(pool.entries[1].units == 444'444'444);
  CHECK(pool.entries[2].units == 111'111'111);
  CHECK(pool.index_of(4) == 1);
  CHECK_FALSE(pool.index_of(3).has_value());
}

TEST_CASE("build_pool skips excluded and zero tokens") {
  const TokenDistribution dist({500'000'000, 0, 300'000'000, 200'000'000});
  const std::vector<TokenId> excluded{0};
  const auto pool = build_pool(dist, 8, excluded);
  CHECK(pool.effective_size() == 2);
  CHECK(pool.entries[0].token == 2);
  CHECK(pool.entries[0].units == 600'000'000);
  CHECK(pool.entries[1].units == 400'000'000);
  const std::vector<TokenId> two{0, 2};
  CHECK_THROWS_AS(build_pool(dist, 8, two), Error);
  CHECK_THROWS_AS(build_pool(dist, 1), Error);
}

TEST_CASE("largest remainder and apportion examples") {
  SUBCASE("remainder ties go to the lowest index") {
    const std::vector<std::uint64_t> w{1, 1, 1};
    CHECK(largest_remainder(w, 4) == std::vector<std::uint64_t>{2, 1, 1});
    CHECK(apportion(w, 4) == std::vector<std::uint64_t>{2, 1, 1});
  }
  SUBCASE("zero counts take one code each") {
    const std::vector<std::uint64_t> w{1000, 1, 1};
    CHECK(largest_remainder(w, 8) == std::vector<std::uint64_t>{8, 0, 0});
    CHECK(apportion(w, 8) == std::vector<std::uint64_t>{6, 1, 1});
  }
  SUBCASE("equal maxima: the later one donates") {
    const std::vector<std::uint64_t> w{5, 5, 0};
    CHECK(apportion(w, 10) == std::vector<std::uint64_t>{5, 4, 1});
  }
  SUBCASE("more entries than codes keeps zeros") {
    const std::vector<std::uint64_t> w{4, 3, 2, 1};
    CHECK(apportion(w, 2) == std::vector<std::uint64_t>{1, 1, 0, 0});
  }
  SUBCASE("all-zero weights") {
    const std::vector<std::uint64_t> w{0, 0};
    CHECK_THROWS_AS(apportion(w, 4), Error);
  }
}

TEST_CASE("apportion agrees with an exact oracle on small inputs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<std::uint64_t> w(n);
    for (auto& x : w) x = rng() % 20;
    if (std::all_of(w.begin(), w.end(), [](auto x) { return x == 0; })) w[0] = 1;
    const std::uint64_t total = std::uint64_t{1} << (rng() % 7);
    const auto got = apportion(w, total);
    REQUIRE(got == oracle_apportion(w, total));
    CHECK(std::accumulate(got.begin(), got.end(), std::uint64_t{0}) == total);
  }
}

TEST_CASE("property: apportioned counts are monotone in pool order") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t n = 2 + rng() % 16;
    std::vector<std::uint64_t> w(n);
    for (auto& x : w) x = rng() % 1000;
    std::sort(w.rbegin(), w.rend());
    if (w[0] == 0) w[0] = 1;
    const auto counts = apportion(w, std::uint64_t{1} << (1 + rng() % 12));
    CHECK(std::is_sorted(counts.rbegin(), counts.rend()));
  }
}

TEST_CASE("allocation weights") {
  const auto pool = pool_of({640'000'000, 360'000'000});
  SUBCASE("condensed beta = 1 is the probability") {
    const auto w = allocation_weights(pool, {AllocationKind::kCondensed, 8, 1.0, 2.0});
    CHECK(std::ldexp(static_cast<double>(w[0]), -48) == doctest::Approx(0.64).epsilon(1e-12));
  }
  SUBCASE("condensed beta = 0.5 is the square root") {
    const auto w = allocation_weights(pool, {AllocationKind::kCondensed, 8, 0.5, 2.0});
    CHECK(std::ldexp(static_cast<double>(w[0]), -48) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::ldexp(static_cast<double>(w[1]), -48) == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("every kind tracks its real-valued formula") {
    std::mt19937_64 rng(23);
    const AllocationSpec specs[] = {
        {AllocationKind::kLinear, 8, 3.0, 2.0},     {AllocationKind::kSqrt, 8, 1.0, 2.0},
        {AllocationKind::kExp, 8, 1.0, 2.0},        {AllocationKind::kLog, 8, 1.0, 2.0},
        {AllocationKind::kLog, 8, 1.0, 7.5},        {AllocationKind::kCondensed, 8, 0.3, 2.0},
        {AllocationKind::kCondensed, 8, 0.77, 2.0},
    };
    for (const auto& spec : specs) {
      for (int t = 0; t < 200; ++t) {
        const std::uint32_t a = 1 + static_cast<std::uint32_t>(rng() % (kGridUnits - 1));
        const auto p = pool_of({a, kGridUnits - a});
        const auto w = allocation_weights(p, spec);
        for (std::size_t i = 0; i < 2; ++i) {
          const double x = p.entries[i].units / 1e9;
          double expected = 0;
          switch (spec.kind) {
            case AllocationKind::kLinear: expected = spec.beta * x; break;
            case AllocationKind::kSqrt: expected = std::sqrt(x); break;
            case AllocationKind::kExp: expected = 1 - std::exp(-2 * x); break;
            case AllocationKind::kLog:
              expected = std::max(0.0, (std::log2(x) + spec.b) / spec.b);
              break;
            case AllocationKind::kCondensed: expected = std::pow(x, spec.beta); break;
          }
          CHECK(std::fabs(std::ldexp(static_cast<double>(w[i]), -48) - expected) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("allocation spec validation") {
  CHECK_THROWS_AS((AllocationSpec{AllocationKind::kCondensed, 0, 1.0, 2.0}.validate()), Error);
  CHECK_THROWS_AS((AllocationSpec{AllocationKind::kCondensed, 33, 1.0, 2.0}.validate()), Error);
  CHECK_THROWS_AS((AllocationSpec{AllocationKind::kCondensed, 8, 0.0, 2.0}.validate()), Error);
  CHECK_THROWS_AS((AllocationSpec{AllocationKind::kCondensed, 8, 1.5, 2.0}.validate()), Error);
  CHECK_THROWS_AS((AllocationSpec{AllocationKind::kLog, 8, 1.0, 1.0}.validate()), Error);
  CHECK_NOTHROW((AllocationSpec{AllocationKind::kCondensed, 32, 0.01, 2.0}.validate()));
  CHECK(parse_allocation_kind("sqrt") == AllocationKind::kSqrt);
  CHECK(to_string(AllocationKind::kCondensed) == "condensed");
  CHECK_THROWS_AS(parse_allocation_kind("cubic"), Error);
}

TEST_CASE("intervals tile the code space") {
  const auto pool = pool_of({500'000'000, 300'000'000, 200'000'000});
  const std::vector<std::uint64_t> counts{4, 3, 1};
  const auto table = build_intervals(pool, counts, 8);
  REQUIRE(table.ranges().size() == 3);
  CHECK(table.ranges()[0].begin == 0);
  CHECK(table.ranges()[0].end == 3);
  CHECK(table.ranges()[1].begin == 4);
  CHECK(table.ranges()[1].end == 6);
  CHECK(table.ranges()[2].begin == 7);
  CHECK(table.ranges()[2].end == 7);
  CHECK(table.locate(5).token == 1);
  CHECK(table.find(2)->begin == 7);
  CHECK(table.find(9) == nullptr);
  const std::vector<std::uint64_t> bad{4, 3, 2};
  CHECK_THROWS_AS(build_intervals(pool, bad, 8), Error);
}

TEST_CASE("common_prefix examples") {
  CHECK(common_prefix(0b0100, 0b0111, 4).to_string() == "01");
  CHECK(common_prefix(0b1010, 0b1010, 4).to_string() == "1010");
  CHECK(common_prefix(0, 255, 8).length == 0);
  CHECK(common_prefix(0, 127, 8).to_string() == "0");
}

TEST_CASE("common_prefix agrees with a bit-by-bit oracle") {
  for (unsigned alpha = 1; alpha <= 7; ++alpha) {
    const std::uint64_t n = std::uint64_t{1} << alpha;
    for (std::uint64_t b = 0; b < n; ++b) {
      for (std::uint64_t e = b; e < n; ++e) {
        const auto got = common_prefix(b, e, alpha);
        const auto want = oracle_prefix(b, e, alpha);
        REQUIRE(got.length == want.length);
        REQUIRE(got.bits == want.bits);
      }
    }
  }
}

TEST_CASE("property: allocate tiles 2^alpha for random pools") {
  std::mt19937_64 rng(29);
  const AllocationKind kinds[] = {AllocationKind::kLinear, AllocationKind::kSqrt,
                                  AllocationKind::kExp, AllocationKind::kLog,
                                  AllocationKind::kCondensed};
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<std::uint64_t> raw(n);
    for (auto& x : raw) x = 1 + rng() % 1000;
    const auto units = quantize_units(raw);
    std::vector<PoolEntry> candidates;
    for (std::size_t i = 0; i < n; ++i) candidates.push_back({TokenId(i), units[i]});
    std::sort(candidates.begin(), candidates.end(), [](auto& a, auto& b) {
      return a.units != b.units ? a.units > b.units : a.token < b.token;
    });
    const auto pool = renormalize_candidates(candidates, static_cast<unsigned>(n));
    AllocationSpec spec{kinds[trial % 5], 1 + static_cast<unsigned>(rng() % 32), 0.5, 2.0};
    const auto table = allocate(pool, spec);
    std::uint64_t next = 0;
    for (const auto& r : table.ranges()) {
      REQUIRE(r.begin == next);
      REQUIRE(r.end >= r.begin);
      next = r.end + 1;
    }
    CHECK(next == spec.total_codes());
    if (spec.total_codes() >= n) CHECK(table.ranges().size() == n);
  }
}

TEST_CASE("constraint validator") {
  SUBCASE("identity: every constraint passes") {
    const auto r = validate_constraints({AllocationKind::kLinear, 8, 1.0, 2.0});
    CHECK(r.growth.pass);
    CHECK(r.concavity.pass);
    CHECK(r.lower_bound.pass);
  }
  SUBCASE("sqrt is concave but breaks the slope clause at the left end") {
    const auto r = validate_constraints({AllocationKind::kSqrt, 8, 1.0, 2.0});
    CHECK(r.concavity.pass);
    CHECK(r.above_identity.pass);
    CHECK_FALSE(r.slope_at_most_one.pass);
    CHECK_FALSE(r.lower_bound.pass);
    CHECK(*r.slope_at_most_one.first_violation_x == doctest::Approx(0.1));
    // f'(x) = 1 / (2 sqrt x) crosses 1 at x = 0.25
    for (const auto& p : r.points) {
      if (std::fabs(p.x - 0.25) > 0.02) CHECK(p.slope_at_most_one == (p.x > 0.25));
    }
  }
  SUBCASE("condensed beta = 0.5 equals sqrt") {
    const auto a = validate_constraints({AllocationKind::kCondensed, 8, 0.5, 2.0});
    const auto b = validate_constraints({AllocationKind::kSqrt, 8, 1.0, 2.0});
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].value == doctest::Approx(b.points[i].value));
    }
  }
  SUBCASE("report JSON names the kind and the three constraints") {
    const auto json = validate_constraints({AllocationKind::kLog, 8, 1.0, 2.0}).to_json();
    CHECK(json.find("\"constraint1\"") != std::string::npos);
    CHECK(json.find("\"constraint3\"") != std::string::npos);
    CHECK(json.find("\"log\"") != std::string::npos);
  }
  SUBCASE("bad domain") {
    ConstraintOptions o;
    o.lower = 0.95;
    CHECK_THROWS_AS(validate_constraints({}, o), Error);
    o = {};
    o.grid_points = 5;
    CHECK_THROWS_AS(validate_constraints({}, o), Error);
  }
}
