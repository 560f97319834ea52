#include "shiftspec/json_format.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace shiftspec {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void dump(std::ostream& os, const nlohmann::json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in << nlohmann::json(key).dump() << ": ";
        dump(os, value, indent, depth + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad_in;
        dump(os, j[i], indent, depth + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case nlohmann::json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace

void dump_json(std::ostream& os, const nlohmann::json& j, int indent) {
  dump(os, j, indent, 0);
  os << "\n";
}

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream ss;
  dump_json(ss, j, indent);
  return ss.str();
}

}  // namespace shiftspec
