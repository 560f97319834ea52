#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "shiftspec/spectrum.hpp"

namespace shiftspec {

/// Eventually periodic weight sequence along a semi-infinite chain.
struct WeightWord {
  std::vector<std::complex<double>> preperiod;
  std::vector<std::complex<double>> period;  // never empty

  std::complex<double> at(std::size_t k) const {  // 0-based along the chain
    if (k < preperiod.size()) return preperiod[k];
    return period[(k - preperiod.size()) % period.size()];
  }
  /// ln of the geometric mean of |period|; -inf when a period weight is 0.
  double log_period_mean() const;
};

struct TreeRay {   // inbound chain r_1 <- r_2 <- ..., Phi(r_1) = core[attach]
  int attach = 0;
  WeightWord weights;
};

struct TreeTail {  // outbound chain Phi(core[from]) = t_1, Phi(t_k) = t_{k+1}
  int from = 0;
  WeightWord weights;
};

/// Finitely presented weighted composition operator S h(v) = w(v) h(Phi(v))
/// on l^2 of a rootless, leafless directed forest: a finite core draining
/// into outbound tails, with eventually periodic inbound rays attached.
/// Construction validates surjectivity and the absence of periodic points.
class TreeSystem {
 public:
  struct Core {
    std::vector<std::string> names;
    std::vector<int> map_to_core;  // -1 when the vertex feeds a tail
    std::vector<int> tail_of;      // tail index, or -1
    std::vector<std::complex<double>> weights;
  };

  static TreeSystem build(Core core, std::vector<TreeRay> rays, std::vector<TreeTail> tails);

  /// Two-sided shift line with weight 2 glued to a one-sided ray with
  /// weight 1/2 through a zero crossing weight.
  static TreeSystem contrexample();

  const Core& core() const noexcept { return core_; }
  const std::vector<TreeRay>& rays() const noexcept { return rays_; }
  const std::vector<TreeTail>& tails() const noexcept { return tails_; }
  double weight_sup() const;

 private:
  TreeSystem(Core core, std::vector<TreeRay> rays, std::vector<TreeTail> tails)
      : core_(std::move(core)), rays_(std::move(rays)), tails_(std::move(tails)) {}
  Core core_;
  std::vector<TreeRay> rays_;
  std::vector<TreeTail> tails_;
};

struct BijectiveLine {
  int tail = -1;
  int ray = -1;                 // backward end chosen for this line
  std::vector<int> core_path;   // from the tail's source back to the ray's attach vertex
  double backward_log_mean = 0.0;
  double forward_log_mean = 0.0;
};

/// Maximal forward-invariant sets on which the map is bijective: one
/// two-sided line per outbound tail, extended backward through the branch
/// of largest asymptotic weight mean. The residual holds everything else.
struct InvariantDecomposition {
  std::vector<BijectiveLine> lines;
  std::vector<int> residual_rays;
  std::vector<int> residual_core;
  bool residual_empty() const { return residual_rays.empty() && residual_core.empty(); }
};

InvariantDecomposition decompose_invariant(const TreeSystem& T);

/// Annulus per two-sided line between its two tail geometric means, plus a
/// central disk from the residual rays. A derived rule; certify with the
/// pseudospectrum lab.
SpectrumDescription predicted_spectrum(const TreeSystem& T);

struct VertexRef {
  enum class Kind : std::uint8_t { core, ray, tail } kind = Kind::core;
  int chain = 0;  // core index, or ray/tail index
  int pos = 0;    // 1-based position along a chain
};

std::string vertex_name(const TreeSystem& T, const VertexRef& v);

/// Finite section over a deterministic window: core first, then rays and
/// tails interleaved round-robin. At most one nonzero per row. The fringe
/// lists record the boundary couplings: `fringe` holds the out-of-window
/// preimages of window vertices and `escape` the window vertices whose
/// image leaves the window. With them, ||(S - lambda)x|| and
/// ||(S - lambda)* x|| are exact for window-supported x, which square
/// sections of shifts notoriously get wrong.
struct WindowTruncation {
  int n = 0;
  std::vector<VertexRef> order;
  struct Entry {
    int row, col;
    std::complex<double> weight;
  };
  std::vector<Entry> entries;  // includes zero weights on in-window edges
  struct Boundary {
    int col;
    std::complex<double> weight;
  };
  std::vector<Boundary> fringe;  // row of an outside preimage, at its image column
  std::vector<Boundary> escape;  // window vertex whose image left the window
};

WindowTruncation truncate(const TreeSystem& T, int n);

/// min over unit window vectors of ||(S - lambda)x|| and ||(S - lambda)*x||,
/// boundary rows included; a point is spectral iff one of the two vanishes
/// in the window limit. Inverse power iteration on the two Gram matrices
/// with sparse LU solves.
double sigma_min(const WindowTruncation& M, std::complex<double> lambda);

struct GridSpec {
  int radii = 64;
  int angles = 64;
  double bound = 0.0;                  // 0 = 1.1 * sup |weights|
  std::vector<double> explicit_radii;  // overrides the radial ladder
};

struct PseudospectrumOptions {
  std::vector<int> windows{100, 200, 400};
  GridSpec grid;
  double epsilon = 1e-2;
  int threads = 0;  // 0 = hardware concurrency
};

enum class Verdict : std::uint8_t { in, out, undecided };
const char* verdict_name(Verdict v) noexcept;

struct GridPoint {
  double radius = 0.0;
  double angle = 0.0;
  std::vector<double> sigma;  // one per window, ascending window size
  Verdict verdict = Verdict::undecided;
  bool predicted_in = false;
  double discrepancy = 0.0;  // radial distance to the predicted boundary on mismatch
};

struct PseudospectrumReport {
  std::vector<double> radii;
  std::vector<double> angles;
  std::vector<int> windows;
  double epsilon = 0.0;
  double bound = 0.0;
  std::vector<GridPoint> points;  // radius-major
  SpectrumDescription prediction;
  double max_radial_discrepancy = 0.0;
  double undecided_fraction = 0.0;
  std::size_t count_in = 0, count_out = 0, count_undecided = 0;
};

PseudospectrumReport pseudospectrum(const TreeSystem& T, const PseudospectrumOptions& opt = {});

}  // namespace shiftspec
