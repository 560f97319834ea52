#pragma once

#include <span>
#include <string>
#include <vector>

#include "shiftspec/errors.hpp"

namespace shiftspec {

/// Finite word over the state alphabet, one entry per symbol.
using Word = std::vector<int>;

std::string word_string(std::span<const int> word);

inline constexpr int kDefaultDepthCap = 12;
// Hard guard on table sizes; depth-capped enumerations can still blow up
// for wide alphabets.
inline constexpr std::size_t kMaxWordTableSize = std::size_t(1) << 22;

struct TransitionFlags {
  bool cuntz_krieger = false;  // additionally require no zero columns
};

/// 0/1 transition matrix of a one-sided topological Markov shift.
/// Rows are sources, columns targets; every row has at least one 1.
/// Immutable after construction.
class TransitionMatrix {
 public:
  /// Checks shape, entries and the row/column conditions.
  static TransitionMatrix validate(const std::vector<std::vector<int>>& entries,
                                   TransitionFlags flags = {});

  int size() const noexcept { return n_; }
  bool edge(int i, int j) const { return bits_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  const std::vector<int>& out_neighbors(int i) const { return adj_[i]; }
  const std::vector<int>& in_neighbors(int j) const { return radj_[j]; }
  int out_degree(int i) const { return static_cast<int>(adj_[i].size()); }
  int column_sum(int j) const { return static_cast<int>(radj_[j].size()); }
  bool cuntz_krieger() const noexcept { return flags_.cuntz_krieger; }

  std::vector<std::vector<int>> entries() const;

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  TransitionMatrix(int n, std::vector<unsigned char> bits, TransitionFlags flags);

  int n_ = 0;
  std::vector<unsigned char> bits_;       // row-major
  std::vector<std::vector<int>> adj_;     // sorted out-neighbors
  std::vector<std::vector<int>> radj_;    // sorted in-neighbors
  TransitionFlags flags_;
};

/// Relabel states: entry (i, j) of the result equals entry
/// (new_to_old[i], new_to_old[j]) of `A`.
TransitionMatrix permuted(const TransitionMatrix& A, std::span<const int> new_to_old);

struct StateClassification {
  std::vector<std::vector<int>> sccs;            // each sorted; ordered by smallest state
  std::vector<int> scc_of;                       // state -> scc index
  std::vector<char> essential_mask;              // per state
  std::vector<int> essential;                    // sorted essential states
  std::vector<std::vector<int>> condensation;    // scc index -> out-edges (no self loops)
};

/// Strongly connected components, essential states and the condensation.
/// A state is essential iff its component is a sink of the condensation.
StateClassification classify(const TransitionMatrix& A);

struct IrreducibleBlock {
  std::vector<int> states;                       // sorted original labels
  std::vector<std::vector<int>> entries;         // submatrix over `states`
  int period = 1;
  std::vector<std::vector<int>> cyclic_classes;  // class t maps into class t+1 (mod period)
};

struct IrreducibleDecomposition {
  std::vector<IrreducibleBlock> blocks;  // ordered by smallest state
  std::vector<int> relabeling;           // new position -> old state; block states first
};

/// Restriction to the essential part, split into irreducible blocks with
/// their periods and cyclic class partitions.
IrreducibleDecomposition decompose(const TransitionMatrix& A);

struct FreenessReport {
  bool condition_I = true;
  bool topologically_free = true;
  std::vector<std::vector<int>> sink_cycles;  // each in orbit order, smallest state first
  std::vector<int> feeder_states;             // forced orbit enters a sink cycle
};

/// Sink cycles are cycles all of whose states have out-degree exactly one;
/// they generate isolated periodic points, so their absence is equivalent
/// to condition (I) and to topological freeness for these shifts.
FreenessReport freeness(const TransitionMatrix& A);

/// All admissible words of length `depth`, lexicographically ordered.
std::vector<Word> admissible_words(const TransitionMatrix& A, int depth,
                                   int depth_cap = kDefaultDepthCap);

namespace detail {
// Adjacency-list graph utilities shared across modules.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj);
// gcd of cycle lengths within one strongly connected vertex set.
int subgraph_period(const std::vector<std::vector<int>>& adj, std::span<const int> component);
}  // namespace detail

}  // namespace shiftspec
