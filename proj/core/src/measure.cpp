#include "shiftspec/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shiftspec {

namespace {

std::vector<std::vector<int>> support_adjacency(const std::vector<std::vector<double>>& Q) {
  const int n = static_cast<int>(Q.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (Q[i][j] > 0.0) adj[i].push_back(j);
  return adj;
}

// Stationary vector of one closed class via the lazy chain (I + Q)/2,
// which has the same stationary vector and no periodicity issues.
std::vector<double> class_stationary(const std::vector<std::vector<double>>& Q,
                                     const std::vector<int>& cls, double tol, long max_iter,
                                     bool& converged) {
  const int m = static_cast<int>(cls.size());
  std::vector<double> pi(m, 1.0 / m), next(m);
  for (long it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) next[b] += pi[a] * Q[cls[a]][cls[b]];
    double diff = 0.0, total = 0.0;
    for (int a = 0; a < m; ++a) {
      next[a] = 0.5 * (next[a] + pi[a]);
      total += next[a];
    }
    for (int a = 0; a < m; ++a) next[a] /= total;
    for (int a = 0; a < m; ++a) diff += std::abs(next[a] - pi[a]);
    pi.swap(next);
    if (diff <= tol) return pi;
  }
  converged = false;
  return pi;
}

}  // namespace

StationaryResult stationary(const std::vector<std::vector<double>>& Q, double tol,
                            long max_iter) {
  const int n = static_cast<int>(Q.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(Q[i].size()) != n) fail(errc::domain_error, "Q is not square");
    double sum = 0.0;
    for (double v : Q[i]) {
      if (v < 0.0) fail(errc::domain_error, "negative transition probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(errc::domain_error, "row " + std::to_string(i) + " of Q sums to " + std::to_string(sum));
  }

  const auto adj = support_adjacency(Q);
  const auto comps = detail::strongly_connected_components(adj);
  std::vector<int> comp_of(n, -1);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (int v : comps[c]) comp_of[v] = c;

  std::vector<int> closed;  // sink components of the condensation
  for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
    bool sink = true;
    for (int v : comps[c])
      for (int w : adj[v]) sink = sink && comp_of[w] == c;
    if (sink) closed.push_back(c);
  }

  StationaryResult out;
  out.pi.assign(n, 0.0);
  out.ergodic = closed.size() == 1;
  const double share = 1.0 / static_cast<double>(closed.size());
  for (int c : closed) {
    bool ok = true;
    const auto pic = class_stationary(Q, comps[c], tol, max_iter, ok);
    out.converged = out.converged && ok;
    for (std::size_t a = 0; a < comps[c].size(); ++a) out.pi[comps[c][a]] = share * pic[a];
  }
  return out;
}

MarkovMeasure MarkovMeasure::create(TransitionMatrix A, std::vector<std::vector<double>> Q,
                                    double tol) {
  const int n = A.size();
  if (static_cast<int>(Q.size()) != n) fail(errc::domain_error, "Q size mismatch");
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (Q[i][j] > 0.0 && !A.edge(i, j))
        fail(errc::domain_error, "transition probability off the edge set at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
      sum += Q[i][j];
    }
    if (std::abs(sum - 1.0) > tol)
      fail(errc::domain_error, "row " + std::to_string(i) + " of Q sums to " + std::to_string(sum));
  }
  StationaryResult st = stationary(Q);
  if (!st.converged) fail(errc::max_iterations, "stationary vector did not converge");
  return MarkovMeasure(std::move(A), std::move(Q), std::move(st.pi), st.ergodic);
}

MarkovMeasure MarkovMeasure::with_stationary(TransitionMatrix A,
                                             std::vector<std::vector<double>> Q,
                                             std::vector<double> pi, bool ergodic, double tol) {
  const int n = A.size();
  if (static_cast<int>(Q.size()) != n || static_cast<int>(pi.size()) != n)
    fail(errc::domain_error, "measure size mismatch");
  double total = 0.0;
  std::vector<double> piQ(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (pi[i] < -tol) fail(errc::domain_error, "negative stationary mass");
    total += pi[i];
    for (int j = 0; j < n; ++j) piQ[j] += pi[i] * Q[i][j];
  }
  if (std::abs(total - 1.0) > tol) fail(errc::domain_error, "stationary vector not normalized");
  for (int j = 0; j < n; ++j)
    if (std::abs(piQ[j] - pi[j]) > tol)
      fail(errc::domain_error, "vector is not stationary for Q");
  return MarkovMeasure(std::move(A), std::move(Q), std::move(pi), ergodic);
}

double MarkovMeasure::cylinder_mass(std::span<const int> w) const {
  if (w.empty()) fail(errc::inadmissible_word, "empty word");
  const int n = A_.size();
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 0 || w[k] >= n) fail(errc::inadmissible_word, word_string(w));
    if (k + 1 < w.size() && !A_.edge(w[k], w[k + 1])) fail(errc::inadmissible_word, word_string(w));
  }
  double mass = pi_[w[0]];
  for (std::size_t k = 0; k + 1 < w.size(); ++k) mass *= Q_[w[k]][w[k + 1]];
  return mass;
}

double MarkovMeasure::entropy() const {
  double h = 0.0;
  const int n = A_.size();
  for (int i = 0; i < n; ++i) {
    if (pi_[i] <= 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const double q = Q_[i][j];
      if (q > 0.0) h -= pi_[i] * q * std::log(q);
    }
  }
  return std::max(h, 0.0);
}

double integrate(const MarkovMeasure& mu, const CylinderFunction& f) {
  if (!(mu.matrix() == f.matrix()))
    fail(errc::domain_error, "measure and function live on different shifts");
  double acc = 0.0;
  const auto& words = f.table().words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double mass = mu.cylinder_mass(words[i]);
    if (mass <= 0.0) continue;  // 0 * (-inf) counts as 0
    const double v = f[i];
    if (v == kNegInf) return kNegInf;
    acc += mass * v;
  }
  return acc;
}

}  // namespace shiftspec
