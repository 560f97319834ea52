#include <Eigen/Dense>
#include <Eigen/SVD>

#include "doctest.h"
#include "shiftspec/tree.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <random>

using namespace shiftspec;
using Cplx = std::complex<double>;

namespace {

// Dense SVD of the two boundary-complete rectangular sections.
double sigma_min_dense(const WindowTruncation& M, Cplx lambda) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M.n, M.n);
  for (const auto& e : M.entries) A(e.row, e.col) += e.weight;
  for (int i = 0; i < M.n; ++i) A(i, i) -= lambda;

  const int fr = static_cast<int>(M.fringe.size());
  Eigen::MatrixXcd R1 = Eigen::MatrixXcd::Zero(M.n + fr, M.n);
  R1.topRows(M.n) = A;
  for (int f = 0; f < fr; ++f) R1(M.n + f, M.fringe[f].col) = M.fringe[f].weight;

  const int es = static_cast<int>(M.escape.size());
  Eigen::MatrixXcd R2 = Eigen::MatrixXcd::Zero(M.n + es, M.n);
  R2.topRows(M.n) = A.adjoint();
  for (int e = 0; e < es; ++e) R2(M.n + e, M.escape[e].col) = std::conj(M.escape[e].weight);

  const Eigen::BDCSVD<Eigen::MatrixXcd> s1(R1), s2(R2);
  return std::min(s1.singularValues()[M.n - 1], s2.singularValues()[M.n - 1]);
}

TreeSystem single_line(std::vector<Cplx> back_period, std::vector<Cplx> fwd_period,
                       Cplx core_weight = 1.0) {
  TreeSystem::Core core;
  core.names = {"u"};
  core.map_to_core = {-1};
  core.tail_of = {0};
  core.weights = {core_weight};
  return TreeSystem::build(std::move(core), {{0, {{}, std::move(back_period)}}},
                           {{0, {{}, std::move(fwd_period)}}});
}

}  // namespace

TEST_SUITE("tree") {
  TEST_CASE("construction validates the tree laws") {
    // Core cycle: periodic points.
    TreeSystem::Core cyc;
    cyc.names = {"a", "b"};
    cyc.map_to_core = {1, 0};
    cyc.tail_of = {-1, -1};
    cyc.weights = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(TreeSystem::build(cyc, {}, {}), doctest::Contains("cycle"), Error);

    // Root: a core vertex without preimage.
    TreeSystem::Core root;
    root.names = {"a", "b"};
    root.map_to_core = {1, -1};
    root.tail_of = {-1, 0};
    root.weights = {1.0, 1.0};
    CHECK_THROWS_WITH_AS(TreeSystem::build(root, {}, {{1, {{}, {1.0}}}}),
                         doctest::Contains("root"), Error);

    CHECK_NOTHROW(TreeSystem::contrexample());
  }

  TEST_CASE("invariant decomposition of the built-in example") {
    const auto T = TreeSystem::contrexample();
    const auto dec = decompose_invariant(T);
    REQUIRE(dec.lines.size() == 1);
    CHECK(dec.lines[0].tail == 0);
    CHECK(dec.lines[0].ray == 0);  // the weight-2 branch wins
    CHECK(dec.residual_rays == std::vector<int>{1});
    CHECK(dec.residual_core == std::vector<int>{1});
  }

  TEST_CASE("predicted spectrum of the built-in example") {
    const auto s = predicted_spectrum(TreeSystem::contrexample());
    REQUIRE(s.disk_radius.has_value());
    CHECK(*s.disk_radius == doctest::Approx(0.5));
    REQUIRE(s.rings.size() == 1);
    CHECK(s.rings[0].r_minus == doctest::Approx(2.0));
    CHECK(s.rings[0].r_plus == doctest::Approx(2.0));
    CHECK(s.radius == doctest::Approx(2.0));
  }

  TEST_CASE("predicted spectra of plain lines") {
    auto s = predicted_spectrum(single_line({1.0}, {1.0}));
    CHECK_FALSE(s.disk_radius.has_value());
    REQUIRE(s.rings.size() == 1);
    CHECK(s.rings[0].r_minus == doctest::Approx(1.0));
    CHECK(s.rings[0].r_plus == doctest::Approx(1.0));

    s = predicted_spectrum(single_line({1.0}, {3.0}));
    REQUIRE(s.rings.size() == 1);
    CHECK(s.rings[0].r_minus == doctest::Approx(1.0));
    CHECK(s.rings[0].r_plus == doctest::Approx(3.0));
  }

  TEST_CASE("component bound over random eventually periodic systems") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> uni(0.3, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
      const int tails = 1 + static_cast<int>(rng() % 2);
      const int extra_rays = static_cast<int>(rng() % 3);
      TreeSystem::Core core;
      std::vector<TreeTail> tls;
      std::vector<TreeRay> rays;
      for (int t = 0; t < tails; ++t) {
        core.names.push_back("c" + std::to_string(t));
        core.map_to_core.push_back(-1);
        core.tail_of.push_back(t);
        core.weights.push_back(uni(rng));
        tls.push_back({t, {{}, {uni(rng)}}});
        rays.push_back({t, {{}, {uni(rng)}}});
      }
      for (int r = 0; r < extra_rays; ++r)
        rays.push_back({static_cast<int>(rng() % tails), {{}, {uni(rng), uni(rng)}}});
      const auto T = TreeSystem::build(std::move(core), std::move(rays), std::move(tls));
      const auto s = predicted_spectrum(T);
      const auto dec = decompose_invariant(T);
      CHECK(s.component_count() <= dec.lines.size() + 1);
    }
  }

  TEST_CASE("truncation of the built-in example matches the hand count") {
    const auto T = TreeSystem::contrexample();
    const auto M = truncate(T, 10);
    CHECK(M.n == 10);
    CHECK(M.entries.size() == 9);
    std::map<double, int> moduli;
    for (const auto& e : M.entries) ++moduli[std::abs(e.weight)];
    CHECK(moduli[2.0] == 5);
    CHECK(moduli[0.5] == 3);
    CHECK(moduli[0.0] == 1);
    // One nonzero per row at most.
    std::map<int, int> per_row;
    for (const auto& e : M.entries) ++per_row[e.row];
    for (const auto& [row, count] : per_row) CHECK(count == 1);
    // Fringe: one row per ray.
    CHECK(M.fringe.size() == T.rays().size());
  }

  TEST_CASE("zero weights truncate to the zero matrix") {
    const auto T = single_line({0.0}, {0.0}, 0.0);
    const auto M = truncate(T, 8);
    for (const auto& e : M.entries) CHECK(std::abs(e.weight) == 0.0);
  }

  TEST_CASE("window sections agree with dense rectangular SVD") {
    std::mt19937_64 rng(89);
    std::uniform_real_distribution<double> uni(0.2, 2.0);
    const auto T = TreeSystem::contrexample();
    const auto M = truncate(T, 24);
    for (int trial = 0; trial < 12; ++trial) {
      const Cplx lambda = std::polar(uni(rng), 2 * M_PI * uni(rng));
      const double fast = sigma_min(M, lambda);
      const double dense = sigma_min_dense(M, lambda);
      CHECK(fast == doctest::Approx(dense).epsilon(1e-7));
    }
  }

  TEST_CASE("grid verdicts depend only on the modulus for modulus weights") {
    const auto T = TreeSystem::contrexample();
    const auto M = truncate(T, 60);
    for (double r : {0.3, 1.0, 2.0}) {
      const double base = sigma_min(M, std::polar(r, 0.17));
      for (double th : {0.9, 2.3, 4.1}) {
        CHECK(sigma_min(M, std::polar(r, th)) == doctest::Approx(base).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("sections are nonincreasing in the window") {
    const auto T = TreeSystem::contrexample();
    const auto M1 = truncate(T, 40);
    const auto M2 = truncate(T, 80);
    const auto M3 = truncate(T, 160);
    for (double r : {0.3, 0.7, 1.0, 1.5, 2.0, 2.1}) {
      const Cplx lambda = std::polar(r, 0.31);
      const double s1 = sigma_min(M1, lambda);
      const double s2 = sigma_min(M2, lambda);
      const double s3 = sigma_min(M3, lambda);
      CHECK(s2 <= s1 + 1e-9);
      CHECK(s3 <= s2 + 1e-9);
    }
  }

  TEST_CASE("pseudospectrum rejects coarse grids") {
    PseudospectrumOptions opt;
    opt.grid.angles = 8;
    CHECK_THROWS_WITH_AS(pseudospectrum(TreeSystem::contrexample(), opt),
                         doctest::Contains("GridTooCoarse"), Error);
    opt.grid.angles = 16;
    opt.grid.radii = 8;
    CHECK_THROWS_WITH_AS(pseudospectrum(TreeSystem::contrexample(), opt),
                         doctest::Contains("GridTooCoarse"), Error);
  }

  TEST_CASE("small lab run on the built-in example") {
    PseudospectrumOptions opt;
    opt.windows = {40, 80};
    opt.grid.radii = 32;
    opt.grid.angles = 16;
    const auto rep = pseudospectrum(TreeSystem::contrexample(), opt);
    CHECK(rep.points.size() == 32 * 16);
    // Deep interior of the disk is IN, the gap region is OUT.
    for (const auto& pt : rep.points) {
      if (pt.radius < 0.3) CHECK(pt.verdict == Verdict::in);
      if (pt.radius > 0.8 && pt.radius < 1.7) CHECK(pt.verdict == Verdict::out);
    }
  }
}
