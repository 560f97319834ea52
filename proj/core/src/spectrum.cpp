#include "shiftspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace shiftspec {

namespace {

constexpr const char* kCertifiedLabel = "certified";
constexpr const char* kDiagnosticLabel = "theorem hypotheses not met - diagnostic only";

CylinderFunction shift_weight(const CylinderFunction& a, const CylinderFunction& rho,
                              int depth_cap) {
  const CylinderFunction mod = pointwise_abs(a);
  return pointwise_mul(pointwise_mul(mod, mod, depth_cap), rho, depth_cap);
}

}  // namespace

bool SpectrumDescription::contains_radius(double r) const {
  if (disk_radius && r <= *disk_radius) return true;
  for (const auto& ring : rings)
    if (r >= ring.r_minus && r <= ring.r_plus) return true;
  return false;
}

RadiusResult weighted_shift_radius(const TransitionMatrix& A, const CylinderFunction& a,
                                   const CylinderFunction& rho, double tol, int depth_cap) {
  require_cocycle(rho);
  const SpectralRadiusResult sr =
      spectral_radius(build_transfer(A, shift_weight(a, rho, depth_cap), depth_cap), tol);
  RadiusResult out;
  out.converged = sr.enclosure.converged;
  out.value = std::sqrt(sr.rho);
  out.lo = std::sqrt(sr.enclosure.lo);
  out.hi = std::sqrt(sr.enclosure.hi);
  return out;
}

double variational_radius(const TransitionMatrix& A, const CylinderFunction& a,
                          const CylinderFunction& rho, const VariationalOptions& opt) {
  require_cocycle(rho);
  const CylinderFunction b = pointwise_ln(shift_weight(a, rho, opt.depth_cap));
  const VariationalResult vr = variational_search(A, b, opt);
  return std::exp(0.5 * vr.value);
}

SpectrumDescription spectrum_sft(const TransitionMatrix& A, const CylinderFunction& a,
                                 const CylinderFunction& rho, double tol, int depth_cap) {
  require_cocycle(rho);
  const FreenessReport free = freeness(A);
  const StateClassification cls = classify(A);

  SpectrumDescription out;
  out.hypotheses.condition_I = free.condition_I;
  out.hypotheses.topologically_free = free.topologically_free;
  out.hypotheses.essential_equals_full = cls.essential.size() == static_cast<std::size_t>(A.size());

  if (free.condition_I) {
    const RadiusResult r = weighted_shift_radius(A, a, rho, tol, depth_cap);
    out.disk_radius = r.value;
    out.radius = r.value;
    out.certified = true;
    out.label = kCertifiedLabel;
    return out;
  }

  // Hypotheses fail: emit a diagnostic decomposition. Each sink cycle is a
  // single periodic orbit carrying one ergodic measure, so it contributes a
  // circle at the orbit's geometric mean of |a| sqrt(rho).
  out.certified = false;
  out.label = kDiagnosticLabel;

  const CylinderFunction w = shift_weight(a, rho, depth_cap);
  const int N = w.depth();
  std::set<std::string> cycle_block_words;
  for (const auto& cycle : free.sink_cycles) {
    const int len = static_cast<int>(cycle.size());
    double log_mean = 0.0;
    for (int p = 0; p < len; ++p) {
      Word x(static_cast<std::size_t>(N));
      for (int k = 0; k < N; ++k) x[k] = cycle[(p + k) % len];
      log_mean += 0.5 * std::log(w.value(x));
      // Track the block words the orbit occupies for the residual restriction.
      const int m = std::max(N - 1, 1);
      Word blockw(static_cast<std::size_t>(m));
      for (int k = 0; k < m; ++k) blockw[k] = cycle[(p + k) % len];
      cycle_block_words.insert(word_string(blockw));
    }
    log_mean /= len;
    const double r = std::exp(log_mean);
    SpectrumRing ring{r, r, "sink cycle " + word_string(cycle)};
    out.rings.push_back(std::move(ring));
  }

  // Residual disk: Perron root of the transfer matrix with the sink-cycle
  // block states removed.
  const TransferMatrix W = build_transfer(A, w, depth_cap);
  const auto& states = *W.presentation().states;
  std::vector<int> keep;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!cycle_block_words.count(word_string(states.word(i)))) keep.push_back(static_cast<int>(i));
  if (!keep.empty()) {
    detail::WeightedRows rows;
    rows.rows.resize(W.size());
    std::vector<char> kept(W.size(), 0);
    for (int i : keep) kept[i] = 1;
    for (std::size_t i = 0; i < W.size(); ++i) {
      if (!kept[i]) continue;
      for (const auto& [j, wt] : W.rows()[i])
        if (kept[j] && wt > 0.0) rows.rows[i].emplace_back(j, wt);
    }
    std::vector<std::vector<int>> adj(W.size());
    for (std::size_t i = 0; i < W.size(); ++i)
      for (const auto& [j, wt] : rows.rows[i]) adj[i].push_back(j);
    double lo = 0.0, hi = 0.0;
    for (const auto& comp : detail::strongly_connected_components(adj)) {
      if (!kept[comp.front()]) continue;
      bool loop = comp.size() > 1;
      for (const auto& [j, wt] : rows.rows[comp.front()]) loop = loop || j == comp.front();
      if (!loop) continue;
      const int period = detail::subgraph_period(adj, comp);
      const detail::CwResult cw = detail::collatz_wielandt(rows, comp, period, {tol, 1000000});
      lo = std::max(lo, cw.lo);
      hi = std::max(hi, cw.hi);
    }
    const double r0 = std::sqrt(0.5 * (lo + hi));
    out.disk_radius = r0;
  }

  // Keep the shape well formed: circles inside the disk are part of it.
  if (out.disk_radius) {
    std::erase_if(out.rings,
                  [&](const SpectrumRing& ring) { return ring.r_plus <= *out.disk_radius; });
  }
  std::sort(out.rings.begin(), out.rings.end(),
            [](const SpectrumRing& x, const SpectrumRing& y) { return x.r_minus < y.r_minus; });
  out.radius = out.disk_radius.value_or(0.0);
  for (const auto& ring : out.rings) out.radius = std::max(out.radius, ring.r_plus);
  return out;
}

RadiusResult cuntz_krieger_radius(const TransitionMatrix& A, const CylinderFunction& a,
                                  double tol, int depth_cap) {
  return weighted_shift_radius(A, a, uniform_cocycle(A), tol, depth_cap);
}

}  // namespace shiftspec
