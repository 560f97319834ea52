#pragma once

#include <vector>

#include "shiftspec/cylinder.hpp"
#include "shiftspec/sft.hpp"

namespace shiftspec {

struct StationaryResult {
  std::vector<double> pi;
  bool ergodic = true;    // false when the support spans several closed classes
  bool converged = true;
};

/// Stationary distribution of a row-stochastic matrix. When the support has
/// several closed classes the result is the uniform mixture of the per-class
/// stationary vectors and `ergodic` is false.
StationaryResult stationary(const std::vector<std::vector<double>>& Q, double tol = 1e-14,
                            long max_iter = 1000000);

/// Shift-invariant Markov probability measure on a topological Markov shift:
/// a row-stochastic matrix supported on the edges plus its stationary vector.
class MarkovMeasure {
 public:
  /// Validates support and row sums, then solves for the stationary vector.
  static MarkovMeasure create(TransitionMatrix A, std::vector<std::vector<double>> Q,
                              double tol = 1e-12);
  /// For callers that already hold a stationary vector (it is re-verified).
  static MarkovMeasure with_stationary(TransitionMatrix A, std::vector<std::vector<double>> Q,
                                       std::vector<double> pi, bool ergodic, double tol = 1e-9);

  const TransitionMatrix& matrix() const noexcept { return A_; }
  const std::vector<std::vector<double>>& Q() const noexcept { return Q_; }
  const std::vector<double>& pi() const noexcept { return pi_; }
  bool ergodic() const noexcept { return ergodic_; }

  /// pi_{w_1} q_{w_1 w_2} ... q_{w_{k-1} w_k}.
  double cylinder_mass(std::span<const int> w) const;

  /// -sum_i pi_i sum_j q_ij ln q_ij with 0 ln 0 = 0.
  double entropy() const;

 private:
  MarkovMeasure(TransitionMatrix A, std::vector<std::vector<double>> Q, std::vector<double> pi,
                bool ergodic)
      : A_(std::move(A)), Q_(std::move(Q)), pi_(std::move(pi)), ergodic_(ergodic) {}

  TransitionMatrix A_;
  std::vector<std::vector<double>> Q_;
  std::vector<double> pi_;
  bool ergodic_;
};

/// Integral of a cylinder function: the mass-weighted sum over admissible
/// words of depth(f). Returns -inf when a positive-mass word carries -inf.
double integrate(const MarkovMeasure& mu, const CylinderFunction& f);

}  // namespace shiftspec
