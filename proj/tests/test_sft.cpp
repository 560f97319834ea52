#include "doctest.h"
#include "oracles.hpp"
#include "shiftspec/sft.hpp"

#include <numeric>
#include <random>

using namespace shiftspec;

namespace {

// Entrywise matrix power over the nonnegative integers.
std::vector<std::vector<long>> int_power(const TransitionMatrix& A, int p) {
  const int n = A.size();
  std::vector<std::vector<long>> M(n, std::vector<long>(n, 0)), R(n, std::vector<long>(n, 0));
  for (int i = 0; i < n; ++i) R[i][i] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = A.edge(i, j) ? 1 : 0;
  for (int k = 0; k < p; ++k) {
    std::vector<std::vector<long>> T(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) T[i][j] += R[i][l] * M[l][j];
    R = std::move(T);
  }
  return R;
}

}  // namespace

TEST_SUITE("sft") {
  TEST_CASE("validate accepts the full shift and rejects zero rows") {
    CHECK_NOTHROW(TransitionMatrix::validate({{1, 1}, {1, 1}}));
    CHECK_THROWS_WITH_AS(TransitionMatrix::validate({{1, 1}, {0, 0}}),
                         doctest::Contains("ZeroRow"), Error);
    CHECK_THROWS_AS(TransitionMatrix::validate({{1, 2}, {1, 1}}), Error);
  }

  TEST_CASE("validate with the column flag") {
    CHECK_NOTHROW(TransitionMatrix::validate({{0, 1}, {1, 0}}, {true}));
    // Column 0 empty: fine without the flag, rejected with it.
    CHECK_NOTHROW(TransitionMatrix::validate({{0, 1}, {0, 1}}));
    CHECK_THROWS_WITH_AS(TransitionMatrix::validate({{0, 1}, {0, 1}}, {true}),
                         doctest::Contains("ZeroColumn"), Error);
  }

  TEST_CASE("classify: full shift, one-way bridge, two-cycle") {
    const auto full = oracles::full_shift(2);
    auto cls = classify(full);
    CHECK(cls.sccs.size() == 1);
    CHECK(cls.essential == std::vector<int>{0, 1});

    const auto bridge = TransitionMatrix::validate({{1, 1}, {0, 1}});
    cls = classify(bridge);
    CHECK(cls.sccs == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(cls.essential == std::vector<int>{1});

    cls = classify(oracles::permutation_chain());
    CHECK(cls.sccs.size() == 1);
    CHECK(cls.essential.size() == 2);
  }

  TEST_CASE("decompose periods and blocks") {
    // Full 2-shift next to a 3-cycle.
    const auto A = TransitionMatrix::validate({{1, 1, 0, 0, 0},
                                               {1, 1, 0, 0, 0},
                                               {0, 0, 0, 1, 0},
                                               {0, 0, 0, 0, 1},
                                               {0, 0, 1, 0, 0}});
    const auto dec = decompose(A);
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.blocks[0].period == 1);
    CHECK(dec.blocks[1].period == 3);
    CHECK(dec.blocks[1].cyclic_classes ==
          std::vector<std::vector<int>>{{2}, {3}, {4}});

    CHECK(decompose(oracles::golden_mean()).blocks[0].period == 1);

    const auto two = decompose(oracles::permutation_chain());
    REQUIRE(two.blocks.size() == 1);
    CHECK(two.blocks[0].period == 2);
    CHECK(two.blocks[0].cyclic_classes == std::vector<std::vector<int>>{{0}, {1}});
  }

  TEST_CASE("decompose is idempotent under its own relabeling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
      const auto A =
          TransitionMatrix::validate(oracles::random_binary_matrix(2 + trial % 4, rng));
      const auto dec = decompose(A);
      const auto B = permuted(A, dec.relabeling);
      const auto dec2 = decompose(B);
      REQUIRE(dec2.blocks.size() == dec.blocks.size());
      // After relabeling the essential part occupies a prefix, block by block.
      int next = 0;
      for (const auto& block : dec2.blocks) {
        for (int s : block.states) CHECK(s == next++);
      }
      for (std::size_t b = 0; b < dec.blocks.size(); ++b)
        CHECK(dec.blocks[b].period == dec2.blocks[b].period);
    }
  }

  TEST_CASE("essentiality is closed under reachability") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      const auto A =
          TransitionMatrix::validate(oracles::random_binary_matrix(2 + trial % 5, rng, 0.4));
      const auto cls = classify(A);
      for (int i = 0; i < A.size(); ++i) {
        if (!cls.essential_mask[i]) continue;
        for (int j : A.out_neighbors(i)) CHECK(cls.essential_mask[j]);
      }
    }
  }

  TEST_CASE("freeness on the named examples") {
    CHECK(freeness(oracles::full_shift(2)).condition_I);
    CHECK(freeness(oracles::golden_mean()).condition_I);

    const auto rep = freeness(oracles::permutation_chain());
    CHECK_FALSE(rep.condition_I);
    CHECK_FALSE(rep.topologically_free);
    REQUIRE(rep.sink_cycles.size() == 1);
    CHECK(rep.sink_cycles[0] == std::vector<int>{0, 1});
  }

  TEST_CASE("feeder states reach a sink cycle along forced edges") {
    // 2 -> 0 with out-degree one feeds the sink 2-cycle {0, 1}.
    const auto A = TransitionMatrix::validate({{0, 1, 0}, {1, 0, 0}, {1, 0, 0}});
    const auto rep = freeness(A);
    REQUIRE(rep.sink_cycles.size() == 1);
    CHECK(rep.feeder_states == std::vector<int>{2});
  }

  TEST_CASE("freeness agrees with brute-force isolated point search") {
    // Exhaustive over every valid 0/1 matrix for n <= 3.
    for (int n = 1; n <= 3; ++n) {
      const int cells = n * n;
      for (long mask = 0; mask < (1L << cells); ++mask) {
        std::vector<std::vector<int>> e(n, std::vector<int>(n, 0));
        bool rows_ok = true;
        for (int i = 0; i < n; ++i) {
          bool any = false;
          for (int j = 0; j < n; ++j) any = (e[i][j] = (mask >> (i * n + j)) & 1) || any;
          rows_ok = rows_ok && any;
        }
        if (!rows_ok) continue;
        const auto A = TransitionMatrix::validate(e);
        CHECK(freeness(A).condition_I == !oracles::has_isolated_point(A));
      }
    }
  }

  TEST_CASE("admissible words: order, counts, cap") {
    const auto full = oracles::full_shift(2);
    CHECK(admissible_words(full, 2) ==
          std::vector<Word>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(admissible_words(oracles::golden_mean(), 3).size() == 5);
    CHECK(admissible_words(full, 1) == std::vector<Word>{{0}, {1}});
    CHECK_THROWS_WITH_AS(admissible_words(full, 13), doctest::Contains("DepthCapExceeded"),
                         Error);
  }

  TEST_CASE("word counts equal power sums of the matrix") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 2 + trial % 3;
      const auto A = TransitionMatrix::validate(oracles::random_binary_matrix(n, rng));
      for (int depth = 1; depth <= 5; ++depth) {
        const auto P = int_power(A, depth - 1);
        long total = 0;
        for (const auto& row : P) total = std::accumulate(row.begin(), row.end(), total);
        CHECK(static_cast<long>(admissible_words(A, depth).size()) == total);
      }
    }
  }
}
