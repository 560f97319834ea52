#include "doctest.h"
#include "oracles.hpp"
#include "shiftspec/transfer.hpp"

#include <cmath>
#include <random>

using namespace shiftspec;

namespace {
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_SUITE("transfer") {
  TEST_CASE("transfer matrices on the basic shifts") {
    const auto full = oracles::full_shift(2);
    const auto W1 = build_transfer(full, CylinderFunction::constant(full, 1, 1.0, ValueKind::nonneg));
    CHECK(W1.size() == 2);
    CHECK(W1.entry(0, 0) == 1.0);
    CHECK(W1.entry(0, 1) == 1.0);
    CHECK(W1.entry(1, 0) == 1.0);
    CHECK(W1.entry(1, 1) == 1.0);

    const auto gm = oracles::golden_mean();
    const auto W2 = build_transfer(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg));
    CHECK(W2.entry(0, 0) == 1.0);
    CHECK(W2.entry(0, 1) == 1.0);
    CHECK(W2.entry(1, 0) == 1.0);
    CHECK(W2.entry(1, 1) == 0.0);

    // Depth-2 weights sit directly on the edges.
    CylinderFunction p(full, 2, {0.3, 0.7, 0.6, 0.4}, ValueKind::nonneg);
    const auto W3 = build_transfer(full, p);
    CHECK(W3.entry(0, 0) == 0.3);
    CHECK(W3.entry(0, 1) == 0.7);
    CHECK(W3.entry(1, 0) == 0.6);
    CHECK(W3.entry(1, 1) == 0.4);
  }

  TEST_CASE("block recoding edge counts") {
    const auto gm = oracles::golden_mean();
    const auto pres = block_presentation(gm, 3);
    CHECK(pres.block_depth == 2);
    CHECK(pres.states->size() == 3);
    CHECK(pres.edge_count() == admissible_words(gm, 3).size());
  }

  TEST_CASE("spectral radius enclosures on known roots") {
    const auto full = oracles::full_shift(2);
    auto sr = spectral_radius(
        build_transfer(full, CylinderFunction::constant(full, 1, 1.0, ValueKind::nonneg)));
    CHECK(sr.rho == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sr.enclosure.lo <= 2.0);
    CHECK(sr.enclosure.hi >= 2.0);

    const auto gm = oracles::golden_mean();
    sr = spectral_radius(
        build_transfer(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg)));
    CHECK(std::abs(sr.rho - kGolden) <= 1e-10);
    CHECK(sr.enclosure.width() <= 1e-10 * sr.rho);

    // A weight-zero appendix state does not move the radius.
    const auto B = TransitionMatrix::validate({{1, 1, 0}, {1, 0, 0}, {1, 0, 0}});
    WordTable table(B, 2);
    std::vector<double> w(table.size());
    for (std::size_t k = 0; k < table.size(); ++k)
      w[k] = table.word(k)[0] == 2 ? 0.0 : 1.0;
    sr = spectral_radius(build_transfer(B, CylinderFunction(B, 2, std::move(w), ValueKind::nonneg)));
    CHECK(std::abs(sr.rho - kGolden) <= 1e-10);
  }

  TEST_CASE("radius zero when all cycles are annihilated") {
    const auto chain = TransitionMatrix::validate({{0, 1}, {1, 0}});
    CylinderFunction c(chain, 2, {0.0, 0.0}, ValueKind::nonneg);
    const auto sr = spectral_radius(build_transfer(chain, c));
    CHECK(sr.rho == 0.0);
    CHECK(pressure(chain, pointwise_ln(c)).value == kNegInf);
  }

  TEST_CASE("pressure ground truths") {
    for (int n : {2, 3, 5}) {
      const auto A = oracles::full_shift(n);
      const auto pr = pressure(A, CylinderFunction::constant(A, 1, 0.0));
      CHECK(std::abs(pr.value - std::log(n)) <= 1e-10);
      CHECK(pr.lo <= std::log(n));
      CHECK(pr.hi >= std::log(n));
    }
    const auto gm = oracles::golden_mean();
    CHECK(std::abs(pressure(gm, CylinderFunction::constant(gm, 1, 0.0)).value -
                   std::log(kGolden)) <= 1e-10);

    // Only the self-loop at state 1 survives a -inf indicator potential.
    const auto full = oracles::full_shift(2);
    const auto b = pointwise_ln(CylinderFunction::indicator(full, Word{1}));
    CHECK(std::abs(pressure(full, b).value) <= 1e-10);
  }

  TEST_CASE("preimage sums converge to block pressure") {
    const auto full = oracles::full_shift(2);
    const auto ones = CylinderFunction::constant(full, 1, 1.0, ValueKind::nonneg);
    CHECK(preimage_sum_estimate(full, ones, Word{0}, 10) == doctest::Approx(std::log(2.0)));

    const auto gm = oracles::golden_mean();
    const auto est =
        preimage_sum_estimate(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg),
                              Word{0}, 20);
    CHECK(std::abs(est - std::log(kGolden)) < 0.05);

    // A sink block with the lone loop reports its own pressure, not the
    // global maximum of the other block.
    const auto B = TransitionMatrix::validate({{1, 1, 1}, {0, 1, 1}, {0, 1, 1}});
    const auto est0 =
        preimage_sum_estimate(B, CylinderFunction::constant(B, 1, 1.0, ValueKind::nonneg),
                              Word{0}, 24);
    CHECK(std::abs(est0 - 0.0) < 1e-9);  // only 0 -> 0 paths end at 0
    const auto est1 =
        preimage_sum_estimate(B, CylinderFunction::constant(B, 1, 1.0, ValueKind::nonneg),
                              Word{1}, 40);
    CHECK(est1 > std::log(2.0) - 0.1);
  }

  TEST_CASE("perron eigendata on closed forms") {
    const auto full = oracles::full_shift(2);
    auto pd = perron_eigendata(
        build_transfer(full, CylinderFunction::constant(full, 1, 1.0, ValueKind::nonneg)));
    CHECK(pd.rho == doctest::Approx(2.0));
    CHECK(pd.right[0] == doctest::Approx(1.0));
    CHECK(pd.right[1] == doctest::Approx(1.0));
    CHECK(pd.left[0] == doctest::Approx(0.5));
    CHECK(pd.left[1] == doctest::Approx(0.5));

    // Period-2 block handled by iterating the square.
    const auto chain = oracles::permutation_chain();
    CylinderFunction c(chain, 2, {2.0, 0.5}, ValueKind::nonneg);
    pd = perron_eigendata(build_transfer(chain, c));
    CHECK(pd.rho == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pd.right[1] / pd.right[0] == doctest::Approx(0.5));

    const auto gm = oracles::golden_mean();
    pd = perron_eigendata(
        build_transfer(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg)));
    CHECK(pd.right[0] == doctest::Approx(1.0));
    CHECK(pd.right[1] == doctest::Approx(1.0 / kGolden));
  }

  TEST_CASE("perron eigendata rejects reducible support") {
    const auto B = TransitionMatrix::validate({{1, 1}, {0, 1}});
    CHECK_THROWS_WITH_AS(
        perron_eigendata(build_transfer(B, CylinderFunction::constant(B, 1, 1.0, ValueKind::nonneg))),
        doctest::Contains("NotIrreducible"), Error);
  }

  TEST_CASE("gibbs measures: bernoulli, markov, parry") {
    const auto full = oracles::full_shift(2);
    auto mu = gibbs_markov(full, CylinderFunction::constant(full, 1, 0.5, ValueKind::nonneg));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(mu.Q()[i][j] == doctest::Approx(0.5));
    CHECK(mu.pi()[0] == doctest::Approx(0.5));

    // Left-stochastic edge weights give the classical Markov distribution.
    const double p00 = 0.3, p10 = 0.7, p01 = 0.6, p11 = 0.4;
    CylinderFunction c(full, 2, {p00, p01, p10, p11}, ValueKind::nonneg);
    mu = gibbs_markov(full, c);
    // Stationary p solves P p = p for P[i][j] = p_ij.
    const double p0 = p01 / (p10 + p01), p1 = 1 - p0;
    (void)p1;
    Word w{0, 1, 1, 0};
    const double expect = p01 * p11 * p10 * p0;  // p_{x1x2} p_{x2x3} p_{x3x4} p_{x4}
    CHECK(std::abs(mu.cylinder_mass(w) - expect) <= 1e-12);

    const auto gm = oracles::golden_mean();
    mu = gibbs_markov(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg));
    CHECK(mu.Q()[0][0] == doctest::Approx(1.0 / kGolden).epsilon(1e-12));
    CHECK(mu.Q()[0][1] == doctest::Approx(1.0 / (kGolden * kGolden)).epsilon(1e-12));
    CHECK(mu.pi()[0] ==
          doctest::Approx(kGolden * kGolden / (kGolden * kGolden + 1)).epsilon(1e-12));
  }

  TEST_CASE("gibbs rejects zero edge weights") {
    const auto gm = oracles::golden_mean();
    CylinderFunction c(gm, 2, {1.0, 0.0, 1.0}, ValueKind::nonneg);
    CHECK_THROWS_WITH_AS(gibbs_markov(gm, c), doctest::Contains("ZeroEdgeWeight"), Error);
  }

  TEST_CASE("ruelle apply: normalization and eigenfunction identities") {
    const auto full = oracles::full_shift(2);
    const auto ones = CylinderFunction::constant(full, 1, 1.0, ValueKind::nonneg);
    const auto L1 = ruelle_apply(ones, ones);
    for (double v : L1.values()) CHECK(v == doctest::Approx(2.0));

    std::mt19937_64 rng(29);
    const auto A = oracles::random_irreducible(3, rng);
    const auto rho = oracles::random_cocycle(A, rng);
    const auto Lrho1 =
        ruelle_apply(rho, CylinderFunction::constant(A, 1, 1.0, ValueKind::nonneg));
    for (double v : Lrho1.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    // The operator eigenfunction is the left Perron vector of W.
    const auto c = oracles::random_positive_depth2(A, rng);
    const auto W = build_transfer(A, c);
    const auto pd = perron_eigendata(W);
    CylinderFunction h(A, 1, pd.left, ValueKind::nonneg);
    const auto Lh = ruelle_apply(c, h);
    for (std::size_t i = 0; i < Lh.values().size(); ++i)
      CHECK(std::abs(Lh[i] - pd.rho * h[i]) <= 1e-10 * std::max(1.0, pd.rho));
  }

  TEST_CASE("collatz-wielandt bounds trap the dense oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 2.0);
    std::bernoulli_distribution keep(0.7);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 5;
      const auto A = oracles::full_shift(n);
      WordTable table(A, 2);
      std::vector<double> w(table.size(), 0.0);
      for (double& v : w)
        if (keep(rng)) v = uni(rng);
      const auto W = build_transfer(A, CylinderFunction(A, 2, w, ValueKind::nonneg));
      const auto sr = spectral_radius(W);
      std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dense[i][j] = W.entry(i, j);
      const double exact = oracles::dense_spectral_radius(dense);
      CHECK(sr.enclosure.lo <= exact + 1e-9);
      CHECK(sr.enclosure.hi >= exact - 1e-9);
      CHECK(std::abs(sr.rho - exact) <= 1e-8 * std::max(1.0, exact));
    }
  }

  TEST_CASE("gelfand limit matches the perron root") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + trial % 4;
      const auto A = oracles::random_irreducible(n, rng, 0.7);
      if (decompose(A).blocks.size() != 1 || decompose(A).blocks[0].period != 1) continue;
      const auto c = oracles::random_positive_depth2(A, rng);
      const auto W = build_transfer(A, c);
      const auto sr = spectral_radius(W);
      std::vector<double> v(W.size(), 1.0);
      double logscale = 0.0;
      const int steps = 64;
      for (int k = 0; k < steps; ++k) {
        v = W.apply_transpose(v);
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        for (double& x : v) x /= m;
        logscale += std::log(m);
      }
      double sup = 0.0;
      for (double x : v) sup = std::max(sup, x);
      const double gelfand = (logscale + std::log(sup)) / steps;
      CHECK(std::abs(gelfand - std::log(sr.rho)) < 0.05);
    }
  }

  TEST_CASE("eigenmeasure weighted by the eigenfunction is invariant") {
    std::mt19937_64 rng(41);
    const auto A = oracles::random_irreducible(3, rng);
    const auto rho = oracles::random_cocycle(A, rng);
    const auto mu = gibbs_markov(A, rho);
    for (int depth = 1; depth <= 4; ++depth) {
      for (const Word& w : admissible_words(A, depth)) {
        const auto f = CylinderFunction::indicator(A, w);
        const double lhs = integrate(mu, ruelle_apply(rho, f));
        const double rhs = integrate(mu, f);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
      }
    }
  }

  TEST_CASE("pressure is additive over disjoint unions") {
    std::mt19937_64 rng(43);
    // Two golden-mean copies with distinct depth-1 potentials.
    const auto AB = TransitionMatrix::validate({{1, 1, 0, 0},
                                                {1, 0, 0, 0},
                                                {0, 0, 1, 1},
                                                {0, 0, 1, 0}});
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> b{uni(rng), uni(rng), uni(rng), uni(rng)};
    const auto gm = oracles::golden_mean();
    CylinderFunction b1(gm, 1, {b[0], b[1]});
    CylinderFunction b2(gm, 1, {b[2], b[3]});
    const auto joint = pressure(AB, CylinderFunction(AB, 1, b)).value;
    const auto split = std::max(pressure(gm, b1).value, pressure(gm, b2).value);
    CHECK(joint == doctest::Approx(split).epsilon(1e-12));
  }
}
