#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

namespace shiftspec {

/// Deterministic JSON serialization: object keys sorted (nlohmann default),
/// floating values printed with 17 significant digits, infinities as the
/// strings "inf" / "-inf". Identical values always produce identical bytes.
void dump_json(std::ostream& os, const nlohmann::json& j, int indent = 2);
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// 17-significant-digit rendering of one double.
std::string format_double(double v);

}  // namespace shiftspec
