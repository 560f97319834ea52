#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftspec/transfer.hpp"
#include "shiftspec/variational.hpp"

namespace shiftspec {

struct SpectrumRing {
  double r_minus = 0.0;
  double r_plus = 0.0;
  std::string provenance;
};

struct SpectrumHypotheses {
  bool topologically_free = false;
  bool condition_I = false;
  bool essential_equals_full = false;
};

/// Rotation-symmetric spectrum shape: an optional central disk plus
/// origin-centered rings. Only radii are stored; any rendering is a union
/// of disks, annuli and circles around zero.
struct SpectrumDescription {
  std::optional<double> disk_radius;
  std::vector<SpectrumRing> rings;  // sorted by r_minus; disk_radius < r_minus
  SpectrumHypotheses hypotheses;
  double radius = 0.0;  // max(disk, ring outer radii)
  bool certified = false;
  std::string label;

  std::size_t component_count() const { return rings.size() + (disk_radius ? 1u : 0u); }
  bool contains_radius(double r) const;
};

struct RadiusResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool converged = true;
};

/// Spectral radius of the weighted shift aT with transfer cocycle rho:
/// r(aT) = exp( P(phi, ln(|a|^2 rho)) / 2 ), the square root of the Perron
/// root of the transfer matrix of |a|^2 rho.
RadiusResult weighted_shift_radius(const TransitionMatrix& A, const CylinderFunction& a,
                                   const CylinderFunction& rho, double tol = 1e-10,
                                   int depth_cap = kDefaultDepthCap);

/// Independent route to the same radius through direct maximization of
/// exp( int ln|a sqrt(rho)| dmu + h(mu)/2 ); never exceeds the transfer
/// route's value.
double variational_radius(const TransitionMatrix& A, const CylinderFunction& a,
                          const CylinderFunction& rho, const VariationalOptions& opt = {});

/// Spectrum of aT. Under condition (I) the spectrum equals the essential
/// spectrum and is the closed disk of radius r(aT). Otherwise the result is
/// a diagnostic decomposition (sink-cycle circles plus a restricted disk)
/// and is labeled as such.
SpectrumDescription spectrum_sft(const TransitionMatrix& A, const CylinderFunction& a,
                                 const CylinderFunction& rho, double tol = 1e-10,
                                 int depth_cap = kDefaultDepthCap);

/// Radius for the canonical (Cuntz-Krieger) isometry: the uniform cocycle.
RadiusResult cuntz_krieger_radius(const TransitionMatrix& A, const CylinderFunction& a,
                                  double tol = 1e-10, int depth_cap = kDefaultDepthCap);

}  // namespace shiftspec
