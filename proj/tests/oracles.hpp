#pragma once

// Slow, obviously-correct reference implementations shared by the unit
// tests and the acceptance runner.

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "dairstega/allocation.hpp"

namespace dairstega::testing {

// Hamilton apportionment in exact rational arithmetic, tie-break to the
// lowest index, followed by the zero-count fix.
inline std::vector<std::uint64_t> oracle_apportion(const std::vector<std::uint64_t>& w,
                                                   std::uint64_t total) {
  const std::uint64_t sum = std::accumulate(w.begin(), w.end(), std::uint64_t{0});
  std::vector<std::uint64_t> counts(w.size());
  std::vector<std::uint64_t> rem(w.size());
  std::uint64_t given = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    counts[i] = w[i] * total / sum;
    rem[i] = w[i] * total % sum;
    given += counts[i];
  }
  for (std::uint64_t left = total - given; left > 0; --left) {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (rem[i] == std::numeric_limits<std::uint64_t>::max()) continue;
      if (!found || rem[i] > rem[best]) {
        best = i;
        found = true;
      }
    }
    ++counts[best];
    rem[best] = std::numeric_limits<std::uint64_t>::max();
  }
  if (total >= w.size()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (counts[i] != 0) continue;
      std::size_t donor = 0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (counts[j] >= counts[donor]) donor = j;
      }
      --counts[donor];
      counts[i] = 1;
    }
  }
  return counts;
}

inline Prefix oracle_prefix(std::uint64_t begin, std::uint64_t end, unsigned alpha) {
  Prefix p;
  for (unsigned i = 0; i < alpha; ++i) {
    const unsigned shift = alpha - 1 - i;
    const auto a = (begin >> shift) & 1;
    if (a != ((end >> shift) & 1)) break;
    p.bits = (p.bits << 1) | a;
    ++p.length;
  }
  return p;
}

}  // namespace dairstega::testing
