#include "shiftspec/tree.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <unordered_map>

namespace shiftspec {

double WeightWord::log_period_mean() const {
  double acc = 0.0;
  for (const auto& w : period) {
    const double m = std::abs(w);
    if (m == 0.0) return kNegInf;
    acc += std::log(m);
  }
  return acc / static_cast<double>(period.size());
}

TreeSystem TreeSystem::build(Core core, std::vector<TreeRay> rays, std::vector<TreeTail> tails) {
  const int nc = static_cast<int>(core.names.size());
  if (nc == 0) fail(errc::invalid_tree, "empty core");
  if (core.map_to_core.size() != core.names.size() || core.tail_of.size() != core.names.size() ||
      core.weights.size() != core.names.size())
    fail(errc::invalid_tree, "core field sizes disagree");

  std::vector<char> tail_used(tails.size(), 0);
  for (int v = 0; v < nc; ++v) {
    const int mc = core.map_to_core[v], tf = core.tail_of[v];
    if ((mc >= 0) == (tf >= 0))
      fail(errc::invalid_tree,
           "core vertex " + core.names[v] + " must either map into the core or feed one tail");
    if (mc >= nc) fail(errc::invalid_tree, "core map target out of range");
    if (tf >= 0) {
      if (tf >= static_cast<int>(tails.size()) || tails[tf].from != v || tail_used[tf])
        fail(errc::invalid_tree, "tail linkage broken at " + core.names[v]);
      tail_used[tf] = 1;
    }
  }
  for (std::size_t t = 0; t < tails.size(); ++t)
    if (!tail_used[t]) fail(errc::invalid_tree, "tail " + std::to_string(t) + " has no source");
  for (const auto& r : rays) {
    if (r.attach < 0 || r.attach >= nc) fail(errc::invalid_tree, "ray attach out of range");
    if (r.weights.period.empty()) fail(errc::non_periodic_weights, "ray with empty period");
  }
  for (const auto& t : tails)
    if (t.weights.period.empty()) fail(errc::non_periodic_weights, "tail with empty period");

  // No periodic points: the core functional graph must be acyclic.
  for (int start = 0; start < nc; ++start) {
    int v = start, steps = 0;
    while (v >= 0 && steps++ <= nc) v = core.map_to_core[v];
    if (v >= 0) fail(errc::invalid_tree, "core map has a cycle (periodic points)");
  }

  // Rootless: every core vertex needs a preimage (core in-edge or a ray).
  std::vector<char> has_preimage(nc, 0);
  for (int v = 0; v < nc; ++v)
    if (core.map_to_core[v] >= 0) has_preimage[core.map_to_core[v]] = 1;
  for (const auto& r : rays) has_preimage[r.attach] = 1;
  for (int v = 0; v < nc; ++v)
    if (!has_preimage[v])
      fail(errc::invalid_tree, "core vertex " + core.names[v] + " is a root (not surjective)");

  return TreeSystem(std::move(core), std::move(rays), std::move(tails));
}

TreeSystem TreeSystem::contrexample() {
  Core core;
  core.names = {"v0", "w-1"};
  core.map_to_core = {-1, 0};
  core.tail_of = {0, -1};
  core.weights = {2.0, 0.0};
  std::vector<TreeRay> rays{{0, {{}, {2.0}}}, {1, {{}, {0.5}}}};
  std::vector<TreeTail> tails{{0, {{}, {2.0}}}};
  return build(std::move(core), std::move(rays), std::move(tails));
}

double TreeSystem::weight_sup() const {
  double sup = 0.0;
  for (const auto& w : core_.weights) sup = std::max(sup, std::abs(w));
  auto scan = [&sup](const WeightWord& ww) {
    for (const auto& w : ww.preperiod) sup = std::max(sup, std::abs(w));
    for (const auto& w : ww.period) sup = std::max(sup, std::abs(w));
  };
  for (const auto& r : rays_) scan(r.weights);
  for (const auto& t : tails_) scan(t.weights);
  return sup;
}

namespace {

std::complex<double> vertex_weight(const TreeSystem& T, const VertexRef& v) {
  switch (v.kind) {
    case VertexRef::Kind::core: return T.core().weights[v.chain];
    case VertexRef::Kind::ray: return T.rays()[v.chain].weights.at(v.pos - 1);
    case VertexRef::Kind::tail: return T.tails()[v.chain].weights.at(v.pos - 1);
  }
  return 0.0;
}

// Forward map on vertex refs.
VertexRef phi(const TreeSystem& T, const VertexRef& v) {
  switch (v.kind) {
    case VertexRef::Kind::core: {
      const int mc = T.core().map_to_core[v.chain];
      if (mc >= 0) return {VertexRef::Kind::core, mc, 0};
      return {VertexRef::Kind::tail, T.core().tail_of[v.chain], 1};
    }
    case VertexRef::Kind::ray:
      if (v.pos > 1) return {VertexRef::Kind::ray, v.chain, v.pos - 1};
      return {VertexRef::Kind::core, T.rays()[v.chain].attach, 0};
    case VertexRef::Kind::tail: return {VertexRef::Kind::tail, v.chain, v.pos + 1};
  }
  return v;
}

// Largest asymptotic log-mean reachable backward from a core vertex.
std::vector<double> backward_means(const TreeSystem& T) {
  const int nc = static_cast<int>(T.core().names.size());
  std::vector<double> mean(nc, kNegInf);
  for (const auto& r : T.rays())
    mean[r.attach] = std::max(mean[r.attach], r.weights.log_period_mean());
  // Core edges u -> v propagate backward cones; the core is acyclic, so a
  // fixed point is reached within nc sweeps.
  for (int sweep = 0; sweep < nc; ++sweep) {
    bool changed = false;
    for (int u = 0; u < nc; ++u) {
      const int v = T.core().map_to_core[u];
      if (v >= 0 && mean[u] > mean[v]) {
        mean[v] = mean[u];
        changed = true;
      }
    }
    if (!changed) break;
  }
  return mean;
}

}  // namespace

InvariantDecomposition decompose_invariant(const TreeSystem& T) {
  const int nc = static_cast<int>(T.core().names.size());
  const std::vector<double> back = backward_means(T);

  // Preimage lists per core vertex.
  std::vector<std::vector<int>> core_pre(nc);
  std::vector<std::vector<int>> ray_at(nc);
  for (int u = 0; u < nc; ++u)
    if (T.core().map_to_core[u] >= 0) core_pre[T.core().map_to_core[u]].push_back(u);
  for (std::size_t r = 0; r < T.rays().size(); ++r) ray_at[T.rays()[r].attach].push_back(static_cast<int>(r));

  InvariantDecomposition out;
  std::vector<char> core_on_line(nc, 0);
  std::vector<char> ray_on_line(T.rays().size(), 0);

  for (std::size_t t = 0; t < T.tails().size(); ++t) {
    BijectiveLine line;
    line.tail = static_cast<int>(t);
    line.forward_log_mean = T.tails()[t].weights.log_period_mean();
    int v = T.tails()[t].from;
    while (true) {
      line.core_path.push_back(v);
      core_on_line[v] = 1;
      // Pick the backward continuation with the largest asymptotic mean;
      // rays win ties so the choice is presentation independent.
      int best_ray = -1;
      double best_ray_mean = kNegInf;
      for (int r : ray_at[v]) {
        const double m = T.rays()[r].weights.log_period_mean();
        if (best_ray == -1 || m > best_ray_mean) {
          best_ray = r;
          best_ray_mean = m;
        }
      }
      int best_core = -1;
      double best_core_mean = kNegInf;
      for (int u : core_pre[v]) {
        if (back[u] > best_core_mean) {
          best_core = u;
          best_core_mean = back[u];
        }
      }
      if (best_ray >= 0 && (best_core < 0 || best_ray_mean >= best_core_mean)) {
        line.ray = best_ray;
        line.backward_log_mean = best_ray_mean;
        ray_on_line[best_ray] = 1;
        break;
      }
      v = best_core;
    }
    out.lines.push_back(std::move(line));
  }

  for (std::size_t r = 0; r < T.rays().size(); ++r)
    if (!ray_on_line[r]) out.residual_rays.push_back(static_cast<int>(r));
  for (int v = 0; v < nc; ++v)
    if (!core_on_line[v]) out.residual_core.push_back(v);
  return out;
}

namespace {

// Merge overlapping components and absorb rings into the central disk.
void normalize_components(SpectrumDescription& s) {
  std::sort(s.rings.begin(), s.rings.end(),
            [](const SpectrumRing& a, const SpectrumRing& b) { return a.r_minus < b.r_minus; });
  std::vector<SpectrumRing> merged;
  for (auto& ring : s.rings) {
    if (s.disk_radius && ring.r_minus <= *s.disk_radius) {
      s.disk_radius = std::max(*s.disk_radius, ring.r_plus);
      continue;
    }
    if (!merged.empty() && ring.r_minus <= merged.back().r_plus) {
      merged.back().r_plus = std::max(merged.back().r_plus, ring.r_plus);
      merged.back().provenance += " + " + ring.provenance;
      continue;
    }
    merged.push_back(std::move(ring));
  }
  s.rings = std::move(merged);
  s.radius = s.disk_radius.value_or(0.0);
  for (const auto& ring : s.rings) s.radius = std::max(s.radius, ring.r_plus);
}

}  // namespace

SpectrumDescription predicted_spectrum(const TreeSystem& T) {
  const InvariantDecomposition dec = decompose_invariant(T);
  SpectrumDescription out;
  out.hypotheses.topologically_free = true;  // no periodic points by construction
  out.hypotheses.condition_I = true;
  out.hypotheses.essential_equals_full = false;
  out.certified = false;
  out.label = "derived, lab-certified";

  for (const auto& line : dec.lines) {
    const double g_back = std::exp(line.backward_log_mean);
    const double g_fwd = std::exp(line.forward_log_mean);
    SpectrumRing ring;
    ring.r_minus = std::min(g_back, g_fwd);
    ring.r_plus = std::max(g_back, g_fwd);
    ring.provenance = "line tail" + std::to_string(line.tail) + " via ray" +
                      std::to_string(line.ray);
    out.rings.push_back(std::move(ring));
  }
  if (!dec.residual_empty()) {
    double r0 = 0.0;
    for (int r : dec.residual_rays)
      r0 = std::max(r0, std::exp(T.rays()[r].weights.log_period_mean()));
    out.disk_radius = r0;
  }
  normalize_components(out);
  return out;
}

std::string vertex_name(const TreeSystem& T, const VertexRef& v) {
  switch (v.kind) {
    case VertexRef::Kind::core: return T.core().names[v.chain];
    case VertexRef::Kind::ray: return "ray" + std::to_string(v.chain) + ":" + std::to_string(v.pos);
    case VertexRef::Kind::tail:
      return "tail" + std::to_string(v.chain) + ":" + std::to_string(v.pos);
  }
  return {};
}

WindowTruncation truncate(const TreeSystem& T, int n) {
  if (n < 8) fail(errc::domain_error, "window size must be >= 8");
  WindowTruncation out;
  out.n = n;
  out.order.reserve(n);
  const int nc = static_cast<int>(T.core().names.size());
  for (int v = 0; v < nc && static_cast<int>(out.order.size()) < n; ++v)
    out.order.push_back({VertexRef::Kind::core, v, 0});
  const int chains = static_cast<int>(T.rays().size() + T.tails().size());
  for (int k = 1; static_cast<int>(out.order.size()) < n && chains > 0; ++k) {
    for (int c = 0; c < chains && static_cast<int>(out.order.size()) < n; ++c) {
      if (c < static_cast<int>(T.rays().size()))
        out.order.push_back({VertexRef::Kind::ray, c, k});
      else
        out.order.push_back({VertexRef::Kind::tail, c - static_cast<int>(T.rays().size()), k});
    }
  }

  auto key = [](const VertexRef& v) {
    return (static_cast<std::uint64_t>(static_cast<int>(v.kind)) << 60) |
           (static_cast<std::uint64_t>(v.chain) << 32) | static_cast<std::uint32_t>(v.pos);
  };
  std::unordered_map<std::uint64_t, int> index;
  for (int i = 0; i < static_cast<int>(out.order.size()); ++i) index.emplace(key(out.order[i]), i);

  for (int i = 0; i < static_cast<int>(out.order.size()); ++i) {
    const VertexRef target = phi(T, out.order[i]);
    const auto it = index.find(key(target));
    if (it != index.end())
      out.entries.push_back({i, it->second, vertex_weight(T, out.order[i])});
    else
      out.escape.push_back({i, vertex_weight(T, out.order[i])});
  }

  // Out-of-window preimages of window vertices. Chains are occupied as
  // prefixes, so each ray contributes at most one such vertex; core edges
  // only matter when the window cannot hold the whole core.
  auto in_window = [&](const VertexRef& v) { return index.count(key(v)) != 0; };
  auto record_pre = [&](const VertexRef& pre, const VertexRef& img) {
    const auto it = index.find(key(img));
    if (it == index.end() || in_window(pre)) return;
    out.fringe.push_back({it->second, vertex_weight(T, pre)});
  };
  for (int u = 0; u < nc; ++u) {
    const int mc = T.core().map_to_core[u];
    if (mc >= 0) record_pre({VertexRef::Kind::core, u, 0}, {VertexRef::Kind::core, mc, 0});
  }
  std::vector<int> ray_len(T.rays().size(), 0), tail_len(T.tails().size(), 0);
  for (const VertexRef& v : out.order) {
    if (v.kind == VertexRef::Kind::ray) ray_len[v.chain] = std::max(ray_len[v.chain], v.pos);
    if (v.kind == VertexRef::Kind::tail) tail_len[v.chain] = std::max(tail_len[v.chain], v.pos);
  }
  for (std::size_t r = 0; r < T.rays().size(); ++r) {
    const int k = ray_len[r];
    const VertexRef pre{VertexRef::Kind::ray, static_cast<int>(r), k + 1};
    const VertexRef img = k >= 1 ? VertexRef{VertexRef::Kind::ray, static_cast<int>(r), k}
                                 : VertexRef{VertexRef::Kind::core, T.rays()[r].attach, 0};
    record_pre(pre, img);
  }
  for (std::size_t t = 0; t < T.tails().size(); ++t) {
    if (tail_len[t] >= 1)
      record_pre({VertexRef::Kind::core, T.tails()[t].from, 0},
                 {VertexRef::Kind::tail, static_cast<int>(t), 1});
  }
  return out;
}

double sigma_min(const WindowTruncation& M, std::complex<double> lambda) {
  using Cplx = std::complex<double>;
  using Sparse = Eigen::SparseMatrix<Cplx>;
  const int n = M.n;

  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(M.entries.size() + n);
  for (const auto& e : M.entries) trip.emplace_back(e.row, e.col, e.weight);
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, Cplx(0.0));
  Sparse A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) -= lambda;
  A.makeCompressed();

  // Gram matrices of the two boundary-complete sections; the fringe and
  // escape rows have a single entry each, so they only touch the diagonal.
  Sparse primal = Sparse(A.adjoint()) * A;
  for (const auto& f : M.fringe) primal.coeffRef(f.col, f.col) += std::norm(f.weight);
  primal.makeCompressed();
  Sparse adjoint = A * Sparse(A.adjoint());
  for (const auto& e : M.escape) adjoint.coeffRef(e.col, e.col) += std::norm(e.weight);
  adjoint.makeCompressed();

  // Inverse power iteration; 1/lambda_max(C^{-1}) = sigma_min^2.
  const auto smallest = [n](const Sparse& C) {
    Eigen::SparseLU<Sparse> lu;
    lu.compute(C);
    if (lu.info() != Eigen::Success) return 0.0;
    std::mt19937_64 rng(0x51D3C0DEull);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = Cplx(uni(rng), uni(rng));
    v.normalize();
    double lam = 0.0;
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXcd w = lu.solve(v);
      if (!w.allFinite()) return 0.0;
      const double ray = std::real(v.dot(w));
      const double nw = w.norm();
      if (!(nw > 0.0)) return 0.0;
      v = w / nw;
      if (it > 2 && std::abs(ray - lam) <= 1e-12 * std::max(std::abs(ray), 1.0)) {
        lam = ray;
        break;
      }
      lam = ray;
    }
    return lam > 0.0 ? 1.0 / std::sqrt(lam) : 0.0;
  };
  return std::min(smallest(primal), smallest(adjoint));
}

const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::in: return "IN";
    case Verdict::out: return "OUT";
    case Verdict::undecided: return "UNDECIDED";
  }
  return "?";
}

namespace {

double distance_to_set(const SpectrumDescription& s, double r) {
  double d = std::numeric_limits<double>::infinity();
  if (s.disk_radius) d = std::min(d, std::max(r - *s.disk_radius, 0.0));
  for (const auto& ring : s.rings) {
    if (r < ring.r_minus)
      d = std::min(d, ring.r_minus - r);
    else if (r > ring.r_plus)
      d = std::min(d, r - ring.r_plus);
    else
      d = 0.0;
  }
  return d;
}

double distance_to_complement(const SpectrumDescription& s, double r) {
  // Depth of r inside the component that contains it.
  double d = 0.0;
  if (s.disk_radius && r <= *s.disk_radius) d = std::max(d, *s.disk_radius - r);
  for (const auto& ring : s.rings)
    if (r >= ring.r_minus && r <= ring.r_plus)
      d = std::max(d, std::min(r - ring.r_minus, ring.r_plus - r));
  return d;
}

}  // namespace

PseudospectrumReport pseudospectrum(const TreeSystem& T, const PseudospectrumOptions& opt) {
  PseudospectrumReport rep;
  rep.epsilon = opt.epsilon;
  rep.windows = opt.windows;
  std::sort(rep.windows.begin(), rep.windows.end());
  if (rep.windows.empty()) fail(errc::domain_error, "no window sizes");

  if (opt.grid.angles < 16) fail(errc::grid_too_coarse, "need at least 16 angles");
  rep.bound = std::max(opt.grid.bound, 1.1 * T.weight_sup());
  if (!(rep.bound > 0.0)) rep.bound = 1.0;
  if (opt.grid.explicit_radii.empty()) {
    if (opt.grid.radii < 32) fail(errc::grid_too_coarse, "need at least 32 radii");
    for (int i = 0; i < opt.grid.radii; ++i)
      rep.radii.push_back(rep.bound * (i + 1) / static_cast<double>(opt.grid.radii));
  } else {
    rep.radii = opt.grid.explicit_radii;
  }
  for (int j = 0; j < opt.grid.angles; ++j)
    rep.angles.push_back(2.0 * M_PI * j / static_cast<double>(opt.grid.angles));

  rep.prediction = predicted_spectrum(T);

  std::vector<WindowTruncation> truncations;
  for (int n : rep.windows) truncations.push_back(truncate(T, n));

  const std::size_t npts = rep.radii.size() * rep.angles.size();
  rep.points.assign(npts, {});
  std::atomic<std::size_t> cursor{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      opt.threads > 0 ? static_cast<unsigned>(opt.threads)
                      : static_cast<unsigned>(std::min<std::size_t>(hw, npts));

  auto work = [&] {
    while (true) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= npts) return;
      const double r = rep.radii[k / rep.angles.size()];
      const double th = rep.angles[k % rep.angles.size()];
      GridPoint& pt = rep.points[k];
      pt.radius = r;
      pt.angle = th;
      const std::complex<double> lambda = std::polar(r, th);
      pt.sigma.reserve(truncations.size());
      for (const auto& tr : truncations) pt.sigma.push_back(sigma_min(tr, lambda));

      // Sections over nested windows are exactly nonincreasing, so the
      // series either stabilizes above the threshold (OUT) or keeps
      // falling toward 0 (IN). Boundary-circle points decay like 1/n and
      // may not pass below epsilon within the window budget; a steady
      // geometric decay ending near the threshold counts as IN.
      // Monotonicity holds exactly for nested windows; the slack only
      // absorbs the iterative solver's accuracy (clustered singular values
      // converge slowly, leaving ~1e-5 relative error at OUT points).
      bool noninc = true, decaying = pt.sigma.size() > 1;
      for (std::size_t w = 1; w < pt.sigma.size(); ++w) {
        const double slack = 1e-4 * std::max(pt.sigma[w - 1], pt.sigma[w]) + 1e-7;
        noninc = noninc && pt.sigma[w] <= pt.sigma[w - 1] + slack;
        decaying = decaying && pt.sigma[w] <= 0.70 * pt.sigma[w - 1] + 1e-7;
      }
      const double last = pt.sigma.back();
      const double prev = pt.sigma.size() > 1 ? pt.sigma[pt.sigma.size() - 2] : last;
      const bool stabilized = last >= 0.71 * prev;
      if (noninc && (last <= opt.epsilon || (decaying && last <= 5.0 * opt.epsilon)))
        pt.verdict = Verdict::in;
      else if (noninc && last >= 5.0 * opt.epsilon && stabilized)
        pt.verdict = Verdict::out;
      else
        pt.verdict = Verdict::undecided;

      pt.predicted_in = rep.prediction.contains_radius(r);
      if (pt.verdict == Verdict::in && !pt.predicted_in)
        pt.discrepancy = distance_to_set(rep.prediction, r);
      else if (pt.verdict == Verdict::out && pt.predicted_in)
        pt.discrepancy = distance_to_complement(rep.prediction, r);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (const GridPoint& pt : rep.points) {
    rep.max_radial_discrepancy = std::max(rep.max_radial_discrepancy, pt.discrepancy);
    switch (pt.verdict) {
      case Verdict::in: ++rep.count_in; break;
      case Verdict::out: ++rep.count_out; break;
      case Verdict::undecided: ++rep.count_undecided; break;
    }
  }
  rep.undecided_fraction =
      npts == 0 ? 0.0 : static_cast<double>(rep.count_undecided) / static_cast<double>(npts);
  return rep;
}

}  // namespace shiftspec
