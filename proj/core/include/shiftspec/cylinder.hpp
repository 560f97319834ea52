#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "shiftspec/sft.hpp"

namespace shiftspec {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Admissible words of one fixed depth with index lookup.
/// Order is lexicographic in state indices; every cylinder-indexed vector
/// in this library uses it.
class WordTable {
 public:
  WordTable(TransitionMatrix A, int depth, int depth_cap = kDefaultDepthCap);

  const TransitionMatrix& matrix() const noexcept { return A_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<Word>& words() const noexcept { return words_; }
  const Word& word(std::size_t i) const { return words_[i]; }

  /// Index of an admissible word, or -1.
  std::ptrdiff_t index_of(std::span<const int> w) const;

 private:
  TransitionMatrix A_;
  int depth_;
  std::vector<Word> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class ValueKind {
  nonneg,  // weights, moduli, cocycles
  real,    // log-scale potentials; -inf marks zero weight
};

/// Locally constant function on the shift space: a value per admissible
/// word of the given depth. Values are real with -inf allowed; complex
/// input data is reduced to its modulus on ingestion.
class CylinderFunction {
 public:
  CylinderFunction(TransitionMatrix A, int depth, std::vector<double> values,
                   ValueKind kind = ValueKind::real, int depth_cap = kDefaultDepthCap);

  static CylinderFunction constant(const TransitionMatrix& A, int depth, double v,
                                   ValueKind kind = ValueKind::real);
  /// 1 on the cylinder of `prefix`, 0 elsewhere; depth = |prefix|.
  static CylinderFunction indicator(const TransitionMatrix& A, const Word& prefix);

  const TransitionMatrix& matrix() const noexcept { return table_->matrix(); }
  int depth() const noexcept { return table_->depth(); }
  ValueKind kind() const noexcept { return kind_; }
  const WordTable& table() const noexcept { return *table_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Value on an admissible word of exactly this depth.
  double value(std::span<const int> w) const;

  double min_value() const;
  double max_abs() const;

 private:
  CylinderFunction(std::shared_ptr<const WordTable> table, std::vector<double> values,
                   ValueKind kind);

  std::shared_ptr<const WordTable> table_;
  std::vector<double> values_;
  ValueKind kind_;
};

/// Reinterpret `f` at depth `M >= depth(f)`: the value on an M-word is the
/// value of `f` on its length-depth(f) prefix.
CylinderFunction lift_depth(const CylinderFunction& f, int M, int depth_cap = kDefaultDepthCap);

CylinderFunction pointwise_mul(const CylinderFunction& f, const CylinderFunction& g,
                               int depth_cap = kDefaultDepthCap);
CylinderFunction pointwise_abs(const CylinderFunction& f);
/// ln with ln(0) = -inf; negative values are a DomainError.
CylinderFunction pointwise_ln(const CylinderFunction& f);
/// exp with exp(-inf) = 0.
CylinderFunction pointwise_exp(const CylinderFunction& f);
CylinderFunction pointwise_scale(const CylinderFunction& f, double t);

struct CocycleReport {
  bool ok = false;
  bool strict = false;            // all values strictly positive (finite type)
  bool in_range = true;           // values within [0, 1]
  double min_value = 0.0;
  std::optional<Word> offending;  // word whose preimage sum failed, if any
  double offending_sum = 0.0;
};

/// Check that preimage sums are exactly one: for every admissible depth-N
/// word v, the values on (i, v_1..v_{N-1}) over predecessors i sum to 1.
CocycleReport validate_cocycle(const CylinderFunction& rho, double tol = 1e-12);

/// Throws OutOfRange / NotNormalized when `rho` is not a cocycle.
void require_cocycle(const CylinderFunction& rho, double tol = 1e-12);

/// Depth-2 cocycle of the canonical transfer operator: value 1/|column sum|
/// on each edge (i, j). Requires every column to be nonzero.
CylinderFunction uniform_cocycle(const TransitionMatrix& A);

}  // namespace shiftspec
