#include "doctest.h"
#include "oracles.hpp"
#include "shiftspec/variational.hpp"

#include <cmath>
#include <random>

using namespace shiftspec;

namespace {
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

MarkovMeasure bernoulli_half() {
  const auto full = oracles::full_shift(2);
  return MarkovMeasure::create(full, {{0.5, 0.5}, {0.5, 0.5}});
}

MarkovMeasure parry_golden() {
  const auto gm = oracles::golden_mean();
  return gibbs_markov(gm, CylinderFunction::constant(gm, 1, 1.0, ValueKind::nonneg));
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("stationary vectors") {
    auto st = stationary({{0.5, 0.5}, {0.5, 0.5}});
    CHECK(st.pi[0] == doctest::Approx(0.5));
    CHECK(st.ergodic);

    st = stationary({{0.0, 1.0}, {1.0, 0.0}});
    CHECK(st.pi[0] == doctest::Approx(0.5).epsilon(1e-12));

    const auto parry = parry_golden();
    st = stationary(parry.Q());
    const double g2 = kGolden * kGolden;
    CHECK(st.pi[0] == doctest::Approx(g2 / (g2 + 1)).epsilon(1e-10));

    // Two closed classes: uniform mixture, flagged non-ergodic.
    st = stationary({{1.0, 0.0}, {0.0, 1.0}});
    CHECK_FALSE(st.ergodic);
    CHECK(st.pi[0] == doctest::Approx(0.5));
  }

  TEST_CASE("cylinder masses") {
    const auto mu = bernoulli_half();
    CHECK(mu.cylinder_mass(Word{0, 1, 0}) == doctest::Approx(0.125));

    const auto chain = oracles::permutation_chain();
    const auto nu = MarkovMeasure::create(chain, {{0.0, 1.0}, {1.0, 0.0}});
    CHECK(nu.cylinder_mass(Word{0, 1, 0, 1}) == doctest::Approx(0.5));
    CHECK_THROWS_WITH_AS(nu.cylinder_mass(Word{0, 0}), doctest::Contains("InadmissibleWord"),
                         Error);

    const auto parry = parry_golden();
    CHECK(parry.cylinder_mass(Word{0, 0}) ==
          doctest::Approx(parry.pi()[0] / kGolden).epsilon(1e-12));

    // Additivity over one-symbol extensions.
    for (const Word& w : admissible_words(parry.matrix(), 3)) {
      double sum = 0.0;
      for (int j : parry.matrix().out_neighbors(w.back())) {
        Word wj = w;
        wj.push_back(j);
        sum += parry.cylinder_mass(wj);
      }
      CHECK(sum == doctest::Approx(parry.cylinder_mass(w)).epsilon(1e-13));
    }
  }

  TEST_CASE("entropy values") {
    for (int n : {2, 3, 4}) {
      const auto full = oracles::full_shift(n);
      std::vector<std::vector<double>> Q(n, std::vector<double>(n, 1.0 / n));
      CHECK(MarkovMeasure::create(full, Q).entropy() == doctest::Approx(std::log(n)));
    }
    const auto chain = oracles::permutation_chain();
    CHECK(MarkovMeasure::create(chain, {{0.0, 1.0}, {1.0, 0.0}}).entropy() == 0.0);
    CHECK(parry_golden().entropy() == doctest::Approx(std::log(kGolden)).epsilon(1e-10));
  }

  TEST_CASE("integration against cylinder functions") {
    const auto mu = bernoulli_half();
    const auto full = mu.matrix();
    CHECK(integrate(mu, CylinderFunction::constant(full, 1, 3.25)) == doctest::Approx(3.25));
    CHECK(integrate(mu, CylinderFunction::constant(full, 2, std::log(0.5))) ==
          doctest::Approx(-std::log(2.0)));

    std::mt19937_64 rng(47);
    const auto f = oracles::random_positive_depth2(full, rng);
    CHECK(integrate(mu, f) == doctest::Approx(integrate(mu, lift_depth(f, 3))).epsilon(1e-14));

    // -inf on a positive-mass cylinder dominates.
    const auto ind = pointwise_ln(CylinderFunction::indicator(full, Word{1}));
    CHECK(integrate(mu, ind) == kNegInf);
  }

  TEST_CASE("variational search finds the measures of maximal entropy") {
    VariationalOptions opt;
    opt.restarts = 12;
    opt.steps = 4000;
    const auto full = oracles::full_shift(2);
    auto res = variational_search(full, CylinderFunction::constant(full, 1, 0.0), opt);
    CHECK(std::abs(res.value - std::log(2.0)) <= 1e-6);
    CHECK(res.measure.Q()[0][0] == doctest::Approx(0.5).epsilon(1e-4));

    const auto gm = oracles::golden_mean();
    res = variational_search(gm, CylinderFunction::constant(gm, 1, 0.0), opt);
    CHECK(std::abs(res.value - std::log(kGolden)) <= 1e-6);
    const auto parry = parry_golden();
    CHECK(res.measure.Q()[0][0] == doctest::Approx(parry.Q()[0][0]).epsilon(1e-3));
  }

  TEST_CASE("variational value of a stochastic potential is zero") {
    const auto full = oracles::full_shift(2);
    CylinderFunction c(full, 2, {0.3, 0.6, 0.7, 0.4}, ValueKind::nonneg);
    VariationalOptions opt;
    opt.restarts = 10;
    opt.steps = 4000;
    const auto res = variational_search(full, pointwise_ln(c), opt);
    CHECK(std::abs(res.value) <= 1e-6);
    const double pr = pressure(full, pointwise_ln(c)).value;
    CHECK(res.value <= pr + 1e-9);
  }

  TEST_CASE("variational dominance against the pressure") {
    std::mt19937_64 rng(53);
    VariationalOptions opt;
    opt.restarts = 6;
    opt.steps = 2500;
    for (int trial = 0; trial < 6; ++trial) {
      const auto A = oracles::random_irreducible(3, rng);
      const auto b = pointwise_ln(oracles::random_positive_depth2(A, rng));
      const auto res = variational_search(A, b, opt);
      const auto pr = pressure(A, b);
      CHECK(res.value <= pr.value + 1e-9);
      CHECK(pr.value - res.value <= 1e-3);
    }
  }

  TEST_CASE("search handles -inf potentials and reports missing support") {
    const auto full = oracles::full_shift(2);
    // Only the self-loop at 1 stays admissible.
    const auto b = pointwise_ln(CylinderFunction::indicator(full, Word{1}));
    VariationalOptions opt;
    opt.restarts = 4;
    opt.steps = 500;
    const auto res = variational_search(full, lift_depth(b, 2), opt);
    CHECK(std::abs(res.value) <= 1e-9);

    const auto zero = CylinderFunction::constant(full, 2, kNegInf);
    CHECK_THROWS_WITH_AS(variational_search(full, zero, opt),
                         doctest::Contains("NoAdmissibleSupport"), Error);
  }

  TEST_CASE("t-entropy closed forms") {
    const auto mu = bernoulli_half();
    CHECK(std::abs(t_entropy(mu, uniform_cocycle(mu.matrix()))) <= 1e-12);

    const auto chain = oracles::permutation_chain();
    const auto nu = MarkovMeasure::create(chain, {{0.0, 1.0}, {1.0, 0.0}});
    CHECK(t_entropy(nu, CylinderFunction::constant(chain, 1, 1.0, ValueKind::nonneg)) == 0.0);

    // Golden mean with the canonical cocycle: integral of ln(rho) plus entropy.
    const auto parry = parry_golden();
    const double g2 = kGolden * kGolden;
    const double mass_into_0 = g2 / (g2 + 1);  // = pi_0 by invariance
    const double expect = std::log(kGolden) - mass_into_0 * std::log(2.0);
    CHECK(t_entropy(parry, uniform_cocycle(parry.matrix())) ==
          doctest::Approx(expect).epsilon(1e-10));
  }

  TEST_CASE("t-entropy estimate: exact zero for the permutation chain") {
    const auto chain = oracles::permutation_chain();
    const auto nu = MarkovMeasure::create(chain, {{0.0, 1.0}, {1.0, 0.0}});
    const auto one = CylinderFunction::constant(chain, 1, 1.0, ValueKind::nonneg);
    for (int n = 1; n <= 3; ++n)
      for (int m = 1; m <= 3; ++m)
        CHECK(std::abs(t_entropy_definition_estimate(nu, one, n, m)) <= 1e-14);
  }

  TEST_CASE("t-entropy estimate dominates the formula and tightens with m") {
    const auto mu = bernoulli_half();
    const auto rho = uniform_cocycle(mu.matrix());
    const double formula = t_entropy(mu, rho);
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= 4; ++m) {
      const double est = t_entropy_definition_estimate(mu, rho, 4, m);
      CHECK(est >= formula - 1e-9);
      CHECK(est <= prev + 1e-12);
      prev = est;
    }
    CHECK(std::abs(t_entropy_definition_estimate(mu, rho, 4, 4) - formula) <= 1e-2);
  }
}
