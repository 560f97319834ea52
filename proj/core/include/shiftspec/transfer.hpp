#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "shiftspec/cylinder.hpp"
#include "shiftspec/measure.hpp"
#include "shiftspec/sft.hpp"

namespace shiftspec {

/// Higher-block recoding of the base shift: block states are the admissible
/// m-words, edges (w, w') the pairs with w = (s_1..s_m), w' = (s_2..s_m, j)
/// and (s_1..s_m, j) admissible. Depth-N functions with N <= m+1 become edge
/// functions on this graph.
struct BlockPresentation {
  std::shared_ptr<const WordTable> states;               // admissible m-words
  std::shared_ptr<const WordTable> edge_words;           // admissible (m+1)-words
  int block_depth = 1;
  // Edge k joins source[k] -> target[k] and reads edge_words->word(k).
  std::vector<int> source;
  std::vector<int> target;

  const TransitionMatrix& base() const { return states->matrix(); }
  std::size_t edge_count() const { return source.size(); }
};

BlockPresentation block_presentation(const TransitionMatrix& A, int potential_depth,
                                     int depth_cap = kDefaultDepthCap);

/// Edge-weighted matrix W over block states realizing a transfer operator:
/// W[w][w'] = c on the (m+1)-word of the edge, 0 off edges. Rows are
/// sources. The operator acts on state-indexed vectors as W^T, so operator
/// eigenfunctions are left eigenvectors of W and eigenmeasures right ones.
class TransferMatrix {
 public:
  TransferMatrix(BlockPresentation pres, std::vector<double> edge_weights);

  const BlockPresentation& presentation() const noexcept { return pres_; }
  std::size_t size() const noexcept { return pres_.states->size(); }
  const std::vector<std::vector<std::pair<int, double>>>& rows() const noexcept { return rows_; }

  double entry(int i, int j) const;
  std::vector<double> apply(std::span<const double> v) const;             // W v
  std::vector<double> apply_transpose(std::span<const double> v) const;   // W^T v
  std::vector<std::vector<double>> dense() const;

 private:
  BlockPresentation pres_;
  // Zero-weight edges are kept so the support always matches the block graph.
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

/// W[w][w'] = c(s_1..s_m, j) for the Ruelle operator of the nonnegative
/// weight c on the m-block presentation, m = max(depth(c) - 1, 1).
TransferMatrix build_transfer(const TransitionMatrix& A, const CylinderFunction& c,
                              int depth_cap = kDefaultDepthCap);

struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;
  bool converged = true;
  std::int64_t iterations = 0;
  double width() const { return hi - lo; }
};

struct SpectralRadiusResult {
  double rho = 0.0;
  Enclosure enclosure;
};

/// Certified Perron root enclosure (relative width <= tol): per nontrivial
/// strongly connected
/// component, power iteration on W^period with Collatz-Wielandt bounds;
/// the radius is the maximum over components (0 for acyclic parts).
/// Non-convergence is flagged on the enclosure, never thrown.
SpectralRadiusResult spectral_radius(const TransferMatrix& W, double tol = 1e-10,
                                     std::int64_t max_iter = 1000000);

struct PressureResult {
  double value = 0.0;  // -inf iff the radius is 0
  double lo = 0.0;
  double hi = 0.0;
  bool converged = true;
};

/// Topological pressure P(phi, b) = ln r(L_{exp b}).
PressureResult pressure(const TransitionMatrix& A, const CylinderFunction& b, double tol = 1e-10,
                        int depth_cap = kDefaultDepthCap);

/// (1/n) ln of the total weight of length-n paths ending at a block state;
/// converges to the pressure of the block containing it.
double preimage_sum_estimate(const TransitionMatrix& A, const CylinderFunction& c,
                             const Word& y_block, int n, int depth_cap = kDefaultDepthCap);

struct PerronData {
  double rho = 0.0;
  std::vector<double> right;  // W r = rho r, sup-norm 1
  std::vector<double> left;   // l^T W = rho l^T, normalized l . r = 1
  Enclosure enclosure;
};

/// Eigendata of an irreducible W. Periodic blocks are handled by running
/// the root bound on W^period and averaging one period of rho-normalized
/// iterates; a final inverse-iteration polish tightens the residuals.
PerronData perron_eigendata(const TransferMatrix& W, double tol = 1e-10,
                            std::int64_t max_iter = 1000000);

/// Gibbs Markov measure of a strictly positive depth <= 2 weight on an
/// irreducible shift: q_ij = W_ij r_j / (rho r_i), pi_i = l_i r_i / (l . r).
MarkovMeasure gibbs_markov(const TransitionMatrix& A, const CylinderFunction& c,
                           double tol = 1e-12);

/// One application of the Ruelle operator: (L_c f)(v) sums c(x) f(x) over
/// the one-symbol extensions x = (i, v...) of each word v. The result has
/// depth max(depth(c), depth(f)) - 1, floored at 1.
CylinderFunction ruelle_apply(const CylinderFunction& c, const CylinderFunction& f,
                              int depth_cap = kDefaultDepthCap);

namespace detail {
// Collatz-Wielandt power iteration over an index subset of a weighted graph.
struct WeightedRows {
  std::vector<std::vector<std::pair<int, double>>> rows;  // strictly positive weights only
};
struct CwOptions {
  double tol = 1e-10;
  std::int64_t max_iter = 1000000;
};
struct CwResult {
  double lo = 0.0, hi = 0.0;
  bool converged = true;
  std::int64_t iterations = 0;
};
CwResult collatz_wielandt(const WeightedRows& rows, std::span<const int> component, int period,
                          const CwOptions& opt);
}  // namespace detail

}  // namespace shiftspec
