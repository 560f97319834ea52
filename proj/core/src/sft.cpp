#include "shiftspec/sft.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace shiftspec {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::zero_row: return "ZeroRow";
    case errc::zero_column: return "ZeroColumn";
    case errc::non_binary_entry: return "NonBinaryEntry";
    case errc::depth_cap_exceeded: return "DepthCapExceeded";
    case errc::domain_error: return "DomainError";
    case errc::not_normalized: return "NotNormalized";
    case errc::out_of_range: return "OutOfRange";
    case errc::no_essential_states: return "NoEssentialStates";
    case errc::max_iterations: return "MaxIterations";
    case errc::not_irreducible: return "NotIrreducible";
    case errc::zero_edge_weight: return "ZeroEdgeWeight";
    case errc::inadmissible_word: return "InadmissibleWord";
    case errc::no_admissible_support: return "NoAdmissibleSupport";
    case errc::non_periodic_weights: return "NonPeriodicWeights";
    case errc::grid_too_coarse: return "GridTooCoarse";
    case errc::invalid_tree: return "InvalidTree";
    case errc::invalid_model: return "InvalidModel";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

std::string word_string(std::span<const int> word) {
  std::string out;
  bool wide = false;
  for (int s : word) wide = wide || s > 9;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (wide && k > 0) out += ',';
    out += std::to_string(word[k]);
  }
  return out;
}

TransitionMatrix::TransitionMatrix(int n, std::vector<unsigned char> bits, TransitionFlags flags)
    : n_(n), bits_(std::move(bits)), adj_(n), radj_(n), flags_(flags) {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (bits_[static_cast<std::size_t>(i) * n_ + j]) {
        adj_[i].push_back(j);
        radj_[j].push_back(i);
      }
}

TransitionMatrix TransitionMatrix::validate(const std::vector<std::vector<int>>& entries,
                                            TransitionFlags flags) {
  const int n = static_cast<int>(entries.size());
  if (n == 0) fail(errc::invalid_model, "empty transition matrix");
  std::vector<unsigned char> bits(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(entries[i].size()) != n)
      fail(errc::invalid_model, "transition matrix is not square at row " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      const int v = entries[i][j];
      if (v != 0 && v != 1)
        fail(errc::non_binary_entry,
             "entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(v));
      bits[static_cast<std::size_t>(i) * n + j] = static_cast<unsigned char>(v);
    }
  }
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < n; ++j) any = any || bits[static_cast<std::size_t>(i) * n + j];
    if (!any) fail(errc::zero_row, "row " + std::to_string(i) + " has no outgoing edge");
  }
  if (flags.cuntz_krieger) {
    for (int j = 0; j < n; ++j) {
      bool any = false;
      for (int i = 0; i < n; ++i) any = any || bits[static_cast<std::size_t>(i) * n + j];
      if (!any) fail(errc::zero_column, "column " + std::to_string(j) + " has no incoming edge");
    }
  }
  return TransitionMatrix(n, std::move(bits), flags);
}

std::vector<std::vector<int>> TransitionMatrix::entries() const {
  std::vector<std::vector<int>> out(n_, std::vector<int>(n_, 0));
  for (int i = 0; i < n_; ++i)
    for (int j : adj_[i]) out[i][j] = 1;
  return out;
}

TransitionMatrix permuted(const TransitionMatrix& A, std::span<const int> new_to_old) {
  const int n = A.size();
  if (static_cast<int>(new_to_old.size()) != n)
    fail(errc::domain_error, "relabeling size mismatch");
  std::vector<std::vector<int>> e(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      e[i][j] = A.edge(new_to_old[i], new_to_old[j]) ? 1 : 0;
  return TransitionMatrix::validate(e, TransitionFlags{A.cuntz_krieger()});
}

namespace detail {

// Iterative Tarjan; components come out in reverse topological order.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> comps;
  int next_index = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.child < adj[f.v].size()) {
        const int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        const int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<int> comp;
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

int subgraph_period(const std::vector<std::vector<int>>& adj, std::span<const int> component) {
  // BFS levels from the smallest vertex; the period is the gcd of
  // level(u) + 1 - level(v) over in-component edges u -> v.
  const int n = static_cast<int>(adj.size());
  std::vector<int> level(n, -1);
  std::vector<char> in_comp(n, 0);
  for (int v : component) in_comp[v] = 1;
  const int root = *std::min_element(component.begin(), component.end());
  std::vector<int> queue{root};
  level[root] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int u = queue[qi];
    for (int v : adj[u]) {
      if (!in_comp[v]) continue;
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  int g = 0;
  for (int u : component)
    for (int v : adj[u])
      if (in_comp[v]) g = std::gcd(g, level[u] + 1 - level[v]);
  return g == 0 ? 1 : std::abs(g);
}

}  // namespace detail

StateClassification classify(const TransitionMatrix& A) {
  const int n = A.size();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) adj[i] = A.out_neighbors(i);

  StateClassification out;
  out.sccs = detail::strongly_connected_components(adj);
  out.scc_of.assign(n, -1);
  for (int c = 0; c < static_cast<int>(out.sccs.size()); ++c)
    for (int v : out.sccs[c]) out.scc_of[v] = c;

  const int ncomp = static_cast<int>(out.sccs.size());
  out.condensation.assign(ncomp, {});
  for (int i = 0; i < n; ++i)
    for (int j : A.out_neighbors(i)) {
      const int ci = out.scc_of[i], cj = out.scc_of[j];
      if (ci != cj) out.condensation[ci].push_back(cj);
    }
  for (auto& edges : out.condensation) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  out.essential_mask.assign(n, 0);
  for (int c = 0; c < ncomp; ++c) {
    if (!out.condensation[c].empty()) continue;  // not a sink component
    for (int v : out.sccs[c]) out.essential_mask[v] = 1;
  }
  for (int v = 0; v < n; ++v)
    if (out.essential_mask[v]) out.essential.push_back(v);
  return out;
}

IrreducibleDecomposition decompose(const TransitionMatrix& A) {
  const StateClassification cls = classify(A);
  // Rows all have an out-edge and the graph is finite, so some component is a
  // sink and the essential set cannot be empty.
  if (cls.essential.empty()) fail(errc::no_essential_states, "no essential states");
  assert(!cls.essential.empty());

  const int n = A.size();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) adj[i] = A.out_neighbors(i);

  IrreducibleDecomposition out;
  for (const auto& comp : cls.sccs) {
    if (!cls.essential_mask[comp.front()]) continue;
    IrreducibleBlock block;
    block.states = comp;
    const int m = static_cast<int>(comp.size());
    block.entries.assign(m, std::vector<int>(m, 0));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) block.entries[a][b] = A.edge(comp[a], comp[b]) ? 1 : 0;
    block.period = detail::subgraph_period(adj, comp);

    // Cyclic classes by BFS level mod period, root = smallest state.
    std::vector<int> level(n, -1);
    std::vector<char> in_comp(n, 0);
    for (int v : comp) in_comp[v] = 1;
    std::vector<int> queue{comp.front()};
    level[comp.front()] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
      for (int v : adj[queue[qi]])
        if (in_comp[v] && level[v] == -1) {
          level[v] = level[queue[qi]] + 1;
          queue.push_back(v);
        }
    block.cyclic_classes.assign(block.period, {});
    for (int v : comp)
      block.cyclic_classes[((level[v] % block.period) + block.period) % block.period].push_back(v);
    for (auto& cc : block.cyclic_classes) std::sort(cc.begin(), cc.end());

    out.blocks.push_back(std::move(block));
  }
  std::sort(out.blocks.begin(), out.blocks.end(),
            [](const auto& a, const auto& b) { return a.states.front() < b.states.front(); });

  for (const auto& block : out.blocks)
    out.relabeling.insert(out.relabeling.end(), block.states.begin(), block.states.end());
  for (int v = 0; v < n; ++v)
    if (!cls.essential_mask[v]) out.relabeling.push_back(v);
  return out;
}

FreenessReport freeness(const TransitionMatrix& A) {
  const int n = A.size();
  FreenessReport out;

  // Forced successor for out-degree-1 states; -1 otherwise.
  std::vector<int> forced(n, -1);
  for (int i = 0; i < n; ++i)
    if (A.out_degree(i) == 1) forced[i] = A.out_neighbors(i).front();

  // 0 unknown, 1 on a sink cycle, 2 feeder, 3 neither.
  std::vector<int> role(n, 0);
  for (int start = 0; start < n; ++start) {
    if (role[start] != 0 || forced[start] == -1) {
      if (forced[start] == -1) role[start] = 3;
      continue;
    }
    std::vector<int> path;
    std::vector<int> pos(n, -1);
    int v = start;
    while (forced[v] != -1 && role[v] == 0 && pos[v] == -1) {
      pos[v] = static_cast<int>(path.size());
      path.push_back(v);
      v = forced[v];
    }
    int tail_role = 3;
    if (pos[v] != -1) {
      // New cycle discovered within this walk.
      std::vector<int> cycle(path.begin() + pos[v], path.end());
      const auto smallest = std::min_element(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), smallest, cycle.end());
      for (int c : cycle) role[c] = 1;
      out.sink_cycles.push_back(std::move(cycle));
      tail_role = 2;
    } else if (role[v] == 1 || role[v] == 2) {
      tail_role = 2;
    }
    for (int u : path)
      if (role[u] == 0) role[u] = tail_role;
  }

  for (int v = 0; v < n; ++v)
    if (role[v] == 2) out.feeder_states.push_back(v);
  std::sort(out.sink_cycles.begin(), out.sink_cycles.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  out.condition_I = out.sink_cycles.empty();
  out.topologically_free = out.condition_I;
  return out;
}

std::vector<Word> admissible_words(const TransitionMatrix& A, int depth, int depth_cap) {
  if (depth < 1) fail(errc::domain_error, "word depth must be >= 1");
  if (depth > depth_cap)
    fail(errc::depth_cap_exceeded,
         "depth " + std::to_string(depth) + " exceeds cap " + std::to_string(depth_cap));
  const int n = A.size();
  std::vector<Word> words;
  Word current(depth);

  // Depth-first in increasing state order gives lexicographic output.
  auto extend = [&](auto&& self, int k) -> void {
    if (k == depth) {
      words.push_back(current);
      if (words.size() > kMaxWordTableSize)
        fail(errc::depth_cap_exceeded, "word table exceeds hard size guard");
      return;
    }
    for (int s = 0; s < n; ++s) {
      if (k > 0 && !A.edge(current[k - 1], s)) continue;
      current[k] = s;
      self(self, k + 1);
    }
  };
  extend(extend, 0);
  return words;
}

}  // namespace shiftspec
