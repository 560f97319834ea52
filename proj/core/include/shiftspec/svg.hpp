#pragma once

#include <string>

#include "shiftspec/spectrum.hpp"
#include "shiftspec/tree.hpp"

namespace shiftspec {

/// 512x512 origin-centered drawing of a rotation-symmetric spectrum; the
/// outer radius maps to 90% of the half-width.
std::string render_spectrum_svg(const SpectrumDescription& s);

/// Polar heatmap of the largest-window sigma_min values with the verdict
/// ring overlay.
std::string render_pseudospectrum_svg(const PseudospectrumReport& rep);

}  // namespace shiftspec
