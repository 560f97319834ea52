#include "shiftspec/variational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace shiftspec {

namespace {

double safe_ln(double q) { return std::log(std::max(q, 1e-300)); }

// Euclidean projection onto the probability simplex. The active set is a
// prefix of the sorted entries, so the last passing threshold is the one.
void project_simplex(std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> u = x;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

struct SubProblem {
  std::vector<int> states;                  // block-state indices of one class
  std::vector<std::vector<int>> targets;    // local out-edges (finite potential)
  std::vector<std::vector<double>> pot;     // potential per local edge
};

struct Candidate {
  double value = kNegInf;
  std::vector<std::vector<double>> Q;  // local row-stochastic
  std::vector<double> pi;
};

// Exact stationary vector of a local irreducible row-stochastic matrix.
Eigen::VectorXd solve_stationary(const std::vector<std::vector<int>>& targets,
                                 const std::vector<std::vector<double>>& Q) {
  const int n = static_cast<int>(targets.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (std::size_t e = 0; e < targets[i].size(); ++e) M(targets[i][e], i) -= Q[i][e];
  M.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::VectorXd pi = M.partialPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) pi[i] = std::max(pi[i], 0.0);
  const double s = pi.sum();
  if (s > 0.0) pi /= s;
  return pi;
}

double objective(const SubProblem& sp, const std::vector<std::vector<double>>& Q,
                 const Eigen::VectorXd& pi) {
  double J = 0.0;
  const int n = static_cast<int>(sp.states.size());
  for (int i = 0; i < n; ++i) {
    if (pi[i] <= 0.0) continue;
    double gi = 0.0;
    for (std::size_t e = 0; e < sp.targets[i].size(); ++e) {
      const double q = Q[i][e];
      if (q > 0.0) gi += q * (sp.pot[i][e] - std::log(q));
    }
    J += pi[i] * gi;
  }
  return J;
}

Candidate run_restart(const SubProblem& sp, std::uint64_t seed, std::uint64_t index, int steps,
                      double improve_tol) {
  const int n = static_cast<int>(sp.states.size());
  std::seed_seq seq{static_cast<std::uint64_t>(0x5u), seed, index};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> expo(1.0);

  std::vector<std::vector<double>> Q(n);
  for (int i = 0; i < n; ++i) {
    Q[i].resize(sp.targets[i].size());
    double sum = 0.0;
    for (double& q : Q[i]) {
      q = expo(rng) + 1e-12;
      sum += q;
    }
    for (double& q : Q[i]) q /= sum;
  }

  Eigen::VectorXd pi = solve_stationary(sp.targets, Q);
  double J = objective(sp, Q, pi);
  double eta = 0.5;

  std::vector<std::vector<double>> trial(n);
  for (int step = 0; step < steps; ++step) {
    // Average-reward gradient: per-row direction b + h(target) - ln q - 1
    // with h the bias solved from (I - Q + 1 pi) h = g.
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
      double gi = 0.0;
      for (std::size_t e = 0; e < sp.targets[i].size(); ++e) {
        const double q = Q[i][e];
        if (q > 0.0) gi += q * (sp.pot[i][e] - std::log(q));
      }
      g[i] = gi;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (std::size_t e = 0; e < sp.targets[i].size(); ++e) M(i, sp.targets[i][e]) -= Q[i][e];
      for (int j = 0; j < n; ++j) M(i, j) += pi[j];
    }
    Eigen::VectorXd h = M.partialPivLu().solve(g);

    bool improved = false;
    while (eta > 1e-14) {
      for (int i = 0; i < n; ++i) {
        trial[i] = Q[i];
        for (std::size_t e = 0; e < sp.targets[i].size(); ++e)
          trial[i][e] += eta * (sp.pot[i][e] + h[sp.targets[i][e]] - safe_ln(Q[i][e]) - 1.0);
        project_simplex(trial[i]);
      }
      const Eigen::VectorXd pi_t = solve_stationary(sp.targets, trial);
      const double J_t = objective(sp, trial, pi_t);
      if (J_t > J) {
        improved = J_t - J > improve_tol;
        Q.swap(trial);
        pi = pi_t;
        J = J_t;
        eta = std::min(eta * 1.25, 4.0);
        break;
      }
      eta *= 0.5;
    }
    if (!improved) break;
  }

  Candidate out;
  pi = solve_stationary(sp.targets, Q);
  out.value = objective(sp, Q, pi);
  out.Q = std::move(Q);
  out.pi.assign(pi.data(), pi.data() + n);
  return out;
}

}  // namespace

VariationalResult variational_search(const TransitionMatrix& A, const CylinderFunction& b,
                                     const VariationalOptions& opt) {
  const BlockPresentation pres = block_presentation(A, b.depth(), opt.depth_cap);
  const CylinderFunction pot = lift_depth(b, pres.block_depth + 1, opt.depth_cap);
  const std::size_t ns = pres.states->size();

  // Block graph restricted to finite-potential edges.
  std::vector<std::vector<int>> adj(ns);
  std::vector<std::vector<double>> wpot(ns);
  for (std::size_t k = 0; k < pres.edge_count(); ++k) {
    if (pot[k] == kNegInf) continue;
    adj[pres.source[k]].push_back(pres.target[k]);
    wpot[pres.source[k]].push_back(pot[k]);
  }

  const auto comps = detail::strongly_connected_components(adj);
  std::vector<SubProblem> problems;
  for (const auto& comp : comps) {
    std::vector<char> in_comp(ns, 0);
    for (int v : comp) in_comp[v] = 1;
    SubProblem sp;
    sp.states = comp;
    std::vector<int> local(ns, -1);
    for (std::size_t a = 0; a < comp.size(); ++a) local[comp[a]] = static_cast<int>(a);
    bool nontrivial = false;
    sp.targets.resize(comp.size());
    sp.pot.resize(comp.size());
    for (std::size_t a = 0; a < comp.size(); ++a) {
      const int v = comp[a];
      for (std::size_t e = 0; e < adj[v].size(); ++e) {
        if (!in_comp[adj[v][e]]) continue;
        sp.targets[a].push_back(local[adj[v][e]]);
        sp.pot[a].push_back(wpot[v][e]);
        nontrivial = true;
      }
    }
    // A candidate support needs every state to keep an out-edge in class.
    bool complete = nontrivial;
    for (const auto& t : sp.targets) complete = complete && !t.empty();
    if (complete) problems.push_back(std::move(sp));
  }
  if (problems.empty())
    fail(errc::no_admissible_support, "potential is -inf on every recurrent edge set");

  // Independent restarts over all classes, deterministic best-of reduction.
  struct Slot {
    double value = kNegInf;
    int problem = -1;
    Candidate cand;
  };
  const std::uint64_t total =
      static_cast<std::uint64_t>(problems.size()) * static_cast<std::uint64_t>(opt.restarts);
  std::vector<Slot> slots(total);
  std::atomic<std::uint64_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::min<unsigned>(hw, total);
  auto work = [&] {
    while (true) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= total) return;
      const int p = static_cast<int>(k / opt.restarts);
      slots[k].problem = p;
      slots[k].cand = run_restart(problems[p], opt.seed, k, opt.steps, opt.improve_tol);
      slots[k].value = slots[k].cand.value;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::uint64_t best = 0;
  for (std::uint64_t k = 1; k < total; ++k)
    if (slots[k].value > slots[best].value) best = k;

  // Assemble a measure on the full block shift: best-class rows, uniform
  // rows elsewhere (they carry no stationary mass).
  std::vector<std::vector<int>> block_entries(ns, std::vector<int>(ns, 0));
  for (std::size_t k = 0; k < pres.edge_count(); ++k)
    block_entries[pres.source[k]][pres.target[k]] = 1;
  TransitionMatrix block = TransitionMatrix::validate(block_entries);

  const SubProblem& sp = problems[slots[best].problem];
  const Candidate& cand = slots[best].cand;
  std::vector<std::vector<double>> Q(ns, std::vector<double>(ns, 0.0));
  std::vector<double> pi(ns, 0.0);
  for (std::size_t a = 0; a < sp.states.size(); ++a) {
    for (std::size_t e = 0; e < sp.targets[a].size(); ++e)
      Q[sp.states[a]][sp.states[sp.targets[a][e]]] = cand.Q[a][e];
    pi[sp.states[a]] = cand.pi[a];
  }
  for (std::size_t v = 0; v < ns; ++v) {
    double sum = 0.0;
    for (double q : Q[v]) sum += q;
    if (sum > 0.0) {
      for (double& q : Q[v]) q /= sum;
      continue;
    }
    const double u = 1.0 / block.out_degree(static_cast<int>(v));
    for (int j : block.out_neighbors(static_cast<int>(v))) Q[v][j] = u;
  }

  VariationalResult out{
      MarkovMeasure::with_stationary(std::move(block), std::move(Q), std::move(pi), true, 1e-8),
      slots[best].value, static_cast<int>(best % opt.restarts)};
  return out;
}

double t_entropy(const MarkovMeasure& mu, const CylinderFunction& rho) {
  const double integral = integrate(mu, pointwise_ln(rho));
  if (integral == kNegInf) return kNegInf;
  return integral + mu.entropy();
}

double t_entropy_definition_estimate(const MarkovMeasure& mu, const CylinderFunction& rho, int n,
                                     int m, int depth_cap) {
  if (n < 1 || m < 1) fail(errc::domain_error, "t-entropy estimate needs n, m >= 1");
  const TransitionMatrix& A = mu.matrix();
  if (!(A == rho.matrix())) fail(errc::domain_error, "measure and cocycle shift mismatch");

  const WordTable cells(A, m, depth_cap);
  std::vector<double> per_n(static_cast<std::size_t>(n), 0.0);
  for (const Word& g : cells.words()) {
    const double mass = mu.cylinder_mass(g);
    if (mass <= 0.0) continue;  // zero-mass summands are dropped
    CylinderFunction f = CylinderFunction::indicator(A, g);
    for (int k = 1; k <= n; ++k) {
      f = ruelle_apply(rho, f, depth_cap);
      const double pushed = integrate(mu, f);
      per_n[k - 1] += pushed > 0.0 ? mass * std::log(pushed / mass) : kNegInf;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k)
    best = std::min(best, per_n[k - 1] == kNegInf ? kNegInf : per_n[k - 1] / k);
  return best;
}

}  // namespace shiftspec
