#include "shiftspec/cylinder.hpp"

#include <algorithm>
#include <cmath>

namespace shiftspec {

WordTable::WordTable(TransitionMatrix A, int depth, int depth_cap)
    : A_(std::move(A)), depth_(depth), words_(admissible_words(A_, depth, depth_cap)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(word_string(words_[i]), i);
}

std::ptrdiff_t WordTable::index_of(std::span<const int> w) const {
  if (static_cast<int>(w.size()) != depth_) return -1;
  const auto it = index_.find(word_string(w));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

CylinderFunction::CylinderFunction(std::shared_ptr<const WordTable> table,
                                   std::vector<double> values, ValueKind kind)
    : table_(std::move(table)), values_(std::move(values)), kind_(kind) {}

CylinderFunction::CylinderFunction(TransitionMatrix A, int depth, std::vector<double> values,
                                   ValueKind kind, int depth_cap)
    : table_(std::make_shared<const WordTable>(std::move(A), depth, depth_cap)),
      values_(std::move(values)),
      kind_(kind) {
  if (values_.size() != table_->size())
    fail(errc::invalid_model, "cylinder function has " + std::to_string(values_.size()) +
                                  " values for " + std::to_string(table_->size()) +
                                  " admissible words");
  if (kind_ == ValueKind::nonneg)
    for (double v : values_)
      if (!(v >= 0.0)) fail(errc::domain_error, "nonnegative cylinder function with value < 0");
}

CylinderFunction CylinderFunction::constant(const TransitionMatrix& A, int depth, double v,
                                            ValueKind kind) {
  auto table = std::make_shared<const WordTable>(A, depth);
  std::vector<double> values(table->size(), v);
  return CylinderFunction(std::move(table), std::move(values), kind);
}

CylinderFunction CylinderFunction::indicator(const TransitionMatrix& A, const Word& prefix) {
  auto table = std::make_shared<const WordTable>(A, static_cast<int>(prefix.size()));
  std::vector<double> values(table->size(), 0.0);
  const std::ptrdiff_t i = table->index_of(prefix);
  if (i < 0) fail(errc::inadmissible_word, word_string(prefix));
  values[static_cast<std::size_t>(i)] = 1.0;
  return CylinderFunction(std::move(table), std::move(values), ValueKind::nonneg);
}

double CylinderFunction::value(std::span<const int> w) const {
  const std::ptrdiff_t i = table_->index_of(w);
  if (i < 0) fail(errc::inadmissible_word, word_string(w));
  return values_[static_cast<std::size_t>(i)];
}

double CylinderFunction::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

double CylinderFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_)
    if (std::isfinite(v) || v > 0) m = std::max(m, std::abs(v));
  return m;
}

CylinderFunction lift_depth(const CylinderFunction& f, int M, int depth_cap) {
  if (M < f.depth()) fail(errc::domain_error, "lift target below current depth");
  if (M == f.depth()) return f;
  auto table = std::make_shared<const WordTable>(f.matrix(), M, depth_cap);
  std::vector<double> values(table->size());
  const int N = f.depth();
  for (std::size_t i = 0; i < table->size(); ++i) {
    const Word& w = table->word(i);
    values[i] = f.value(std::span<const int>(w.data(), static_cast<std::size_t>(N)));
  }
  return CylinderFunction(f.matrix(), M, std::move(values), f.kind(), depth_cap);
}

CylinderFunction pointwise_mul(const CylinderFunction& f, const CylinderFunction& g,
                               int depth_cap) {
  if (!(f.matrix() == g.matrix()))
    fail(errc::domain_error, "pointwise product of functions on different shifts");
  const int D = std::max(f.depth(), g.depth());
  const CylinderFunction lf = lift_depth(f, D, depth_cap);
  const CylinderFunction lg = lift_depth(g, D, depth_cap);
  std::vector<double> values(lf.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = lf[i] * lg[i];
  const ValueKind kind = (f.kind() == ValueKind::nonneg && g.kind() == ValueKind::nonneg)
                             ? ValueKind::nonneg
                             : ValueKind::real;
  return CylinderFunction(f.matrix(), D, std::move(values), kind, depth_cap);
}

CylinderFunction pointwise_abs(const CylinderFunction& f) {
  std::vector<double> values(f.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::abs(f[i]);
  return CylinderFunction(f.matrix(), f.depth(), std::move(values), ValueKind::nonneg);
}

CylinderFunction pointwise_ln(const CylinderFunction& f) {
  std::vector<double> values(f.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = f[i];
    if (v < 0.0) fail(errc::domain_error, "ln of negative value");
    values[i] = v == 0.0 ? kNegInf : std::log(v);
  }
  return CylinderFunction(f.matrix(), f.depth(), std::move(values), ValueKind::real);
}

CylinderFunction pointwise_exp(const CylinderFunction& f) {
  std::vector<double> values(f.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::exp(f[i]);
  return CylinderFunction(f.matrix(), f.depth(), std::move(values), ValueKind::nonneg);
}

CylinderFunction pointwise_scale(const CylinderFunction& f, double t) {
  std::vector<double> values(f.values().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = t * f[i];
  const ValueKind kind =
      (f.kind() == ValueKind::nonneg && t >= 0.0) ? ValueKind::nonneg : ValueKind::real;
  return CylinderFunction(f.matrix(), f.depth(), std::move(values), kind);
}

CocycleReport validate_cocycle(const CylinderFunction& rho, double tol) {
  CocycleReport report;
  report.min_value = rho.min_value();
  for (double v : rho.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      report.ok = false;
      report.in_range = false;
      return report;
    }
  }
  const TransitionMatrix& A = rho.matrix();
  const int N = rho.depth();
  const WordTable& table = rho.table();

  // Preimages of a point starting with v = (v_1..v_N) are indexed by the
  // predecessors i of v_1; each contributes rho on (i, v_1..v_{N-1}).
  Word x(static_cast<std::size_t>(N));
  for (const Word& v : table.words()) {
    double sum = 0.0;
    for (int i : A.in_neighbors(v[0])) {
      x[0] = i;
      for (int k = 1; k < N; ++k) x[k] = v[k - 1];
      sum += rho.value(x);
    }
    if (std::abs(sum - 1.0) > tol) {
      report.ok = false;
      report.offending = v;
      report.offending_sum = sum;
      return report;
    }
  }
  report.ok = true;
  report.strict = report.min_value > 0.0;
  return report;
}

void require_cocycle(const CylinderFunction& rho, double tol) {
  const CocycleReport report = validate_cocycle(rho, tol);
  if (report.ok) return;
  if (!report.in_range) fail(errc::out_of_range, "cocycle values must lie in [0, 1]");
  fail(errc::not_normalized, "preimage sum over " +
                                 word_string(report.offending ? *report.offending : Word{}) +
                                 " is " + std::to_string(report.offending_sum));
}

CylinderFunction uniform_cocycle(const TransitionMatrix& A) {
  const int n = A.size();
  for (int j = 0; j < n; ++j)
    if (A.column_sum(j) == 0)
      fail(errc::zero_column, "state " + std::to_string(j) + " has no predecessor");
  auto table = std::make_shared<const WordTable>(A, 2);
  std::vector<double> values(table->size());
  for (std::size_t i = 0; i < table->size(); ++i)
    values[i] = 1.0 / static_cast<double>(A.column_sum(table->word(i)[1]));
  return CylinderFunction(A, 2, std::move(values), ValueKind::nonneg);
}

}  // namespace shiftspec
