#include "shiftspec/transfer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

namespace shiftspec {

BlockPresentation block_presentation(const TransitionMatrix& A, int potential_depth,
                                     int depth_cap) {
  if (potential_depth < 1) fail(errc::domain_error, "potential depth must be >= 1");
  const int m = std::max(potential_depth - 1, 1);
  BlockPresentation pres;
  pres.block_depth = m;
  pres.states = std::make_shared<const WordTable>(A, m, depth_cap);
  pres.edge_words = std::make_shared<const WordTable>(A, m + 1, depth_cap);
  pres.source.reserve(pres.edge_words->size());
  pres.target.reserve(pres.edge_words->size());
  for (const Word& e : pres.edge_words->words()) {
    const std::span<const int> head(e.data(), static_cast<std::size_t>(m));
    const std::span<const int> tail(e.data() + 1, static_cast<std::size_t>(m));
    pres.source.push_back(static_cast<int>(pres.states->index_of(head)));
    pres.target.push_back(static_cast<int>(pres.states->index_of(tail)));
  }
  return pres;
}

TransferMatrix::TransferMatrix(BlockPresentation pres, std::vector<double> edge_weights)
    : pres_(std::move(pres)), rows_(pres_.states->size()) {
  if (edge_weights.size() != pres_.edge_count())
    fail(errc::domain_error, "edge weight count mismatch");
  for (std::size_t k = 0; k < edge_weights.size(); ++k)
    rows_[pres_.source[k]].emplace_back(pres_.target[k], edge_weights[k]);
  for (auto& row : rows_) std::sort(row.begin(), row.end());
}

double TransferMatrix::entry(int i, int j) const {
  for (const auto& [col, w] : rows_[i])
    if (col == j) return w;
  return 0.0;
}

std::vector<double> TransferMatrix::apply(std::span<const double> v) const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [j, w] : rows_[i]) out[i] += w * v[j];
  return out;
}

std::vector<double> TransferMatrix::apply_transpose(std::span<const double> v) const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [j, w] : rows_[i]) out[j] += w * v[i];
  return out;
}

std::vector<std::vector<double>> TransferMatrix::dense() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& [j, w] : rows_[i]) out[i][j] = w;
  return out;
}

TransferMatrix build_transfer(const TransitionMatrix& A, const CylinderFunction& c,
                              int depth_cap) {
  for (double v : c.values())
    if (!(v >= 0.0)) fail(errc::domain_error, "transfer weight must be nonnegative");
  BlockPresentation pres = block_presentation(A, c.depth(), depth_cap);
  const CylinderFunction lifted = lift_depth(c, pres.block_depth + 1, depth_cap);
  std::vector<double> weights(pres.edge_count());
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = lifted[k];
  return TransferMatrix(std::move(pres), std::move(weights));
}

namespace detail {

CwResult collatz_wielandt(const WeightedRows& rows, std::span<const int> component, int period,
                          const CwOptions& opt) {
  const int m = static_cast<int>(component.size());
  std::vector<int> local(rows.rows.size(), -1);
  for (int a = 0; a < m; ++a) local[component[a]] = a;

  // Restricted rows in local indices.
  std::vector<std::vector<std::pair<int, double>>> sub(m);
  for (int a = 0; a < m; ++a)
    for (const auto& [j, w] : rows.rows[component[a]])
      if (local[j] >= 0) sub[a].emplace_back(local[j], w);

  std::vector<double> v(m, 1.0), w(m);
  CwResult res;
  double best_lo = 0.0, best_hi = std::numeric_limits<double>::infinity();
  const double inv_period = 1.0 / period;

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int a = 0; a < m; ++a)
      for (const auto& [b, wt] : sub[a]) y[a] += wt * x[b];
  };

  std::vector<double> t1(m), t2(m);
  while (res.iterations < opt.max_iter) {
    // One application of W^period via ping-pong buffers.
    const std::vector<double>* src = &v;
    for (int p = 0; p < period; ++p) {
      std::vector<double>* dst = (p + 1 == period) ? &w : (src == &t1 ? &t2 : &t1);
      apply(*src, *dst);
      src = dst;
      ++res.iterations;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int a = 0; a < m; ++a) {
      const double r = w[a] / v[a];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    // Bounds from every positive iterate enclose rho^period; intersect them.
    best_lo = std::max(best_lo, lo);
    best_hi = std::min(best_hi, hi);
    if (best_hi < best_lo) best_lo = best_hi = 0.5 * (best_lo + best_hi);

    const double rlo = std::pow(best_lo, inv_period);
    const double rhi = std::pow(best_hi, inv_period);
    // Relative width keeps the enclosure scale invariant, so the radius is
    // exactly homogeneous under scaling of the weights.
    if (rhi - rlo <= opt.tol * std::max(rlo, 1e-300)) {
      res.lo = rlo;
      res.hi = rhi;
      return res;
    }
    const double scale = *std::max_element(w.begin(), w.end());
    if (!(scale > 0.0)) {  // weights annihilated the vector; radius is 0
      res.lo = res.hi = 0.0;
      return res;
    }
    for (int a = 0; a < m; ++a) v[a] = w[a] / scale;
  }
  res.lo = std::pow(best_lo, inv_period);
  res.hi = std::pow(best_hi, inv_period);
  res.converged = false;
  return res;
}

namespace {

WeightedRows positive_rows(const TransferMatrix& W) {
  WeightedRows out;
  out.rows.resize(W.size());
  for (std::size_t i = 0; i < W.size(); ++i)
    for (const auto& [j, w] : W.rows()[i])
      if (w > 0.0) out.rows[i].emplace_back(j, w);
  return out;
}

std::vector<std::vector<int>> adjacency_of(const WeightedRows& rows) {
  std::vector<std::vector<int>> adj(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i)
    for (const auto& [j, w] : rows.rows[i]) adj[i].push_back(j);
  return adj;
}

bool component_nontrivial(const WeightedRows& rows, const std::vector<int>& comp) {
  if (comp.size() > 1) return true;
  for (const auto& [j, w] : rows.rows[comp.front()])
    if (j == comp.front()) return true;
  return false;
}

}  // namespace
}  // namespace detail

SpectralRadiusResult spectral_radius(const TransferMatrix& W, double tol,
                                     std::int64_t max_iter) {
  const detail::WeightedRows rows = detail::positive_rows(W);
  const auto adj = detail::adjacency_of(rows);
  const auto comps = detail::strongly_connected_components(adj);

  SpectralRadiusResult out;
  out.enclosure.lo = 0.0;
  out.enclosure.hi = 0.0;
  for (const auto& comp : comps) {
    if (!detail::component_nontrivial(rows, comp)) continue;
    const int period = detail::subgraph_period(adj, comp);
    const detail::CwResult cw =
        detail::collatz_wielandt(rows, comp, period, {tol, max_iter});
    out.enclosure.lo = std::max(out.enclosure.lo, cw.lo);
    out.enclosure.hi = std::max(out.enclosure.hi, cw.hi);
    out.enclosure.iterations += cw.iterations;
    out.enclosure.converged = out.enclosure.converged && cw.converged;
  }
  out.rho = 0.5 * (out.enclosure.lo + out.enclosure.hi);
  return out;
}

PressureResult pressure(const TransitionMatrix& A, const CylinderFunction& b, double tol,
                        int depth_cap) {
  const CylinderFunction c = pointwise_exp(b);
  const SpectralRadiusResult sr = spectral_radius(build_transfer(A, c, depth_cap), tol);
  PressureResult out;
  out.converged = sr.enclosure.converged;
  out.value = sr.rho > 0.0 ? std::log(sr.rho) : kNegInf;
  out.lo = sr.enclosure.lo > 0.0 ? std::log(sr.enclosure.lo) : kNegInf;
  out.hi = sr.enclosure.hi > 0.0 ? std::log(sr.enclosure.hi) : kNegInf;
  return out;
}

double preimage_sum_estimate(const TransitionMatrix& A, const CylinderFunction& c,
                             const Word& y_block, int n, int depth_cap) {
  if (n < 1) fail(errc::domain_error, "preimage depth must be >= 1");
  const TransferMatrix W = build_transfer(A, c, depth_cap);
  const auto& states = *W.presentation().states;
  const std::ptrdiff_t y = states.index_of(y_block);
  if (y < 0) fail(errc::inadmissible_word, word_string(y_block));

  std::vector<double> v(W.size(), 0.0);
  v[static_cast<std::size_t>(y)] = 1.0;
  double log_scale = 0.0;
  for (int step = 0; step < n; ++step) {
    v = W.apply(v);
    const double scale = *std::max_element(v.begin(), v.end());
    if (!(scale > 0.0)) return kNegInf;
    for (double& x : v) x /= scale;
    log_scale += std::log(scale);
  }
  double total = 0.0;
  for (double x : v) total += x;
  return (std::log(total) + log_scale) / n;
}

namespace {

// rho-normalized power iteration whose averages over one period kill the
// oscillating peripheral modes.
std::vector<double> averaged_eigenvector(
    const std::function<std::vector<double>(std::span<const double>)>& apply, std::size_t n,
    double rho, int period, double tol, std::int64_t max_iter, std::int64_t* used) {
  std::vector<double> v(n, 1.0);
  std::deque<std::vector<double>> window;
  std::vector<double> best;
  double best_res = std::numeric_limits<double>::infinity();
  std::int64_t it = 0;
  while (it < max_iter) {
    v = apply(v);
    ++it;
    for (double& x : v) x /= rho;
    const double sup = *std::max_element(v.begin(), v.end());
    if (!(sup > 0.0)) break;
    if (sup > 1e8 || sup < 1e-8) {
      for (double& x : v) x /= sup;
      for (auto& u : window)
        for (double& x : u) x /= sup;
    }
    window.push_back(v);
    if (static_cast<int>(window.size()) > period) window.pop_front();
    if (static_cast<int>(window.size()) == period && it % period == 0) {
      std::vector<double> r(n, 0.0);
      for (const auto& u : window)
        for (std::size_t i = 0; i < n; ++i) r[i] += u[i];
      const double nr = *std::max_element(r.begin(), r.end());
      if (!(nr > 0.0)) continue;
      for (double& x : r) x /= nr;
      const std::vector<double> wr = apply(r);
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(wr[i] - rho * r[i]));
      if (res < best_res) {
        best_res = res;
        best = r;
      }
      if (res <= tol) break;
    }
  }
  if (used) *used = it;
  return best.empty() ? v : best;
}

}  // namespace

PerronData perron_eigendata(const TransferMatrix& W, double tol, std::int64_t max_iter) {
  const detail::WeightedRows rows = detail::positive_rows(W);
  const auto adj = detail::adjacency_of(rows);
  const auto comps = detail::strongly_connected_components(adj);
  const std::size_t n = W.size();
  if (comps.size() != 1 || comps.front().size() != n)
    fail(errc::not_irreducible, "transfer matrix support is not irreducible");
  if (!detail::component_nontrivial(rows, comps.front()))
    fail(errc::not_irreducible, "single state without a loop");

  const int period = detail::subgraph_period(adj, comps.front());
  const detail::CwResult cw =
      detail::collatz_wielandt(rows, comps.front(), period, {tol, max_iter});
  if (!cw.converged) fail(errc::max_iterations, "Perron root enclosure did not converge");

  PerronData out;
  out.enclosure.lo = cw.lo;
  out.enclosure.hi = cw.hi;
  out.enclosure.iterations = cw.iterations;
  out.rho = 0.5 * (cw.lo + cw.hi);

  auto fwd = [&W](std::span<const double> v) { return W.apply(v); };
  auto bwd = [&W](std::span<const double> v) { return W.apply_transpose(v); };
  std::int64_t used = 0;
  out.right = averaged_eigenvector(fwd, n, out.rho, period, tol, max_iter, &used);
  out.left = averaged_eigenvector(bwd, n, out.rho, period, tol, max_iter, &used);

  // Inverse-iteration polish; brings residuals near machine precision,
  // which the Gibbs cylinder-mass identities need.
  if (n <= 600) {
    Eigen::MatrixXd M(n, n);
    M.setZero();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [j, w] : W.rows()[i]) M(static_cast<Eigen::Index>(i), j) = w;
    Eigen::VectorXd r(n), l(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = out.right[i];
    for (std::size_t i = 0; i < n; ++i) l[i] = out.left[i];
    double rho = out.rho;
    for (int round = 0; round < 3; ++round) {
      const double jitter = 1e-14 * std::max(rho, 1.0);
      Eigen::MatrixXd S = M - (rho + jitter) * Eigen::MatrixXd::Identity(n, n);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
      Eigen::VectorXd r2 = lu.solve(r);
      Eigen::VectorXd l2 = lu.transpose().solve(l);
      if (r2.allFinite() && r2.cwiseAbs().maxCoeff() > 0.0) r = r2 / r2.cwiseAbs().maxCoeff();
      if (l2.allFinite() && l2.cwiseAbs().maxCoeff() > 0.0) l = l2 / l2.cwiseAbs().maxCoeff();
      if (r.sum() < 0.0) r = -r;
      if (l.sum() < 0.0) l = -l;
      const double lr = l.dot(r);
      if (std::abs(lr) > 0.0) rho = std::clamp(l.dot(M * r) / lr, cw.lo, cw.hi);
    }
    // Keep the polish only if it stayed in the positive cone.
    if (r.minCoeff() > 0.0 && l.minCoeff() > 0.0) {
      out.rho = rho;
      for (std::size_t i = 0; i < n; ++i) out.right[i] = r[i];
      for (std::size_t i = 0; i < n; ++i) out.left[i] = l[i];
    }
  }

  const double sup = *std::max_element(out.right.begin(), out.right.end());
  for (double& x : out.right) x /= sup;
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += out.left[i] * out.right[i];
  if (!(dot > 0.0)) fail(errc::max_iterations, "left/right eigenvector normalization failed");
  for (double& x : out.left) x /= dot;

  // Residual contract check.
  const std::vector<double> wr = W.apply(out.right);
  const std::vector<double> lw = W.apply_transpose(out.left);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res = std::max(res, std::abs(wr[i] - out.rho * out.right[i]));
    res = std::max(res, std::abs(lw[i] - out.rho * out.left[i]));
  }
  if (res > std::max(tol, 1e-10) * std::max(out.rho, 1.0))
    fail(errc::max_iterations, "eigenvector residual " + std::to_string(res));
  return out;
}

MarkovMeasure gibbs_markov(const TransitionMatrix& A, const CylinderFunction& c, double tol) {
  if (c.depth() > 2) fail(errc::domain_error, "Gibbs construction requires depth <= 2 weights");
  const CylinderFunction c2 = lift_depth(c, 2);
  for (std::size_t k = 0; k < c2.values().size(); ++k)
    if (!(c2[k] > 0.0))
      fail(errc::zero_edge_weight, "weight vanishes on edge " + word_string(c2.table().word(k)));

  const StateClassification cls = classify(A);
  if (cls.sccs.size() != 1) fail(errc::not_irreducible, "transition matrix is not irreducible");

  const TransferMatrix W = build_transfer(A, c2);
  const PerronData pd = perron_eigendata(W, std::min(tol, 1e-10));

  const int n = A.size();
  std::vector<std::vector<double>> Q(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (const auto& [j, w] : W.rows()[i]) {
      Q[i][j] = w * pd.right[j] / (pd.rho * pd.right[i]);
      row_sum += Q[i][j];
    }
    if (std::abs(row_sum - 1.0) > 1e-8)
      fail(errc::max_iterations, "Gibbs rows failed to normalize");
    for (int j = 0; j < n; ++j) Q[i][j] /= row_sum;
  }
  std::vector<double> pi(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    pi[i] = pd.left[i] * pd.right[i];
    total += pi[i];
  }
  for (double& x : pi) x /= total;
  return MarkovMeasure::with_stationary(A, std::move(Q), std::move(pi), true, 1e-9);
}

CylinderFunction ruelle_apply(const CylinderFunction& c, const CylinderFunction& f,
                              int depth_cap) {
  if (!(c.matrix() == f.matrix()))
    fail(errc::domain_error, "operator weight and argument live on different shifts");
  const TransitionMatrix& A = c.matrix();
  const int D = std::max(c.depth(), f.depth());
  const int out_depth = std::max(D - 1, 1);

  const CylinderFunction lc = lift_depth(c, D, depth_cap);
  const CylinderFunction lf = lift_depth(f, D, depth_cap);
  const WordTable& arg_table = lc.table();

  WordTable out_table(A, out_depth, depth_cap);
  std::vector<double> values(out_table.size(), 0.0);
  Word x(static_cast<std::size_t>(D));
  for (std::size_t vi = 0; vi < out_table.size(); ++vi) {
    const Word& v = out_table.word(vi);
    double sum = 0.0;
    for (int i : A.in_neighbors(v[0])) {
      x[0] = i;
      for (int k = 1; k < D; ++k) x[k] = v[k - 1];
      const std::ptrdiff_t xi = arg_table.index_of(x);
      if (xi < 0) continue;
      sum += lc[static_cast<std::size_t>(xi)] * lf[static_cast<std::size_t>(xi)];
    }
    values[vi] = sum;
  }
  const ValueKind kind = (c.kind() == ValueKind::nonneg && f.kind() == ValueKind::nonneg)
                             ? ValueKind::nonneg
                             : ValueKind::real;
  return CylinderFunction(A, out_depth, std::move(values), kind, depth_cap);
}

}  // namespace shiftspec
