#pragma once

#include <cstdint>
#include <optional>

#include "shiftspec/measure.hpp"
#include "shiftspec/transfer.hpp"

namespace shiftspec {

struct VariationalOptions {
  int restarts = 200;
  int steps = 5000;
  std::uint64_t seed = 0;
  int threads = 0;               // 0 = hardware concurrency
  double improve_tol = 1e-12;    // per-restart convergence threshold
  int depth_cap = kDefaultDepthCap;
};

struct VariationalResult {
  MarkovMeasure measure;  // on the block shift of the potential
  double value = kNegInf;
  int best_restart = -1;
  TransitionMatrix block_matrix() const { return measure.matrix(); }
};

/// Direct maximization of J(mu) = int b dmu + h(mu) over Markov measures on
/// the block shift of depth(b) - 1 (projected gradient ascent with Dirichlet
/// restarts). Serves as the independent oracle for the pressure; its value
/// never exceeds the pressure.
VariationalResult variational_search(const TransitionMatrix& A, const CylinderFunction& b,
                                     const VariationalOptions& opt = {});

/// t-entropy of the transfer operator with cocycle rho at mu:
/// tau = int ln(rho) dmu + h(mu).
double t_entropy(const MarkovMeasure& mu, const CylinderFunction& rho);

/// Partition-based estimate of the t-entropy: cylinder partitions of depth
/// `m`, operator powers up to `n`, minimum over both. Always an upper bound
/// on the t-entropy formula (cylinder partitions are a restricted family).
double t_entropy_definition_estimate(const MarkovMeasure& mu, const CylinderFunction& rho, int n,
                                     int m, int depth_cap = kDefaultDepthCap);

}  // namespace shiftspec
