#pragma once

#include <stdexcept>
#include <string>

namespace shiftspec {

enum class errc {
  zero_row,
  zero_column,
  non_binary_entry,
  depth_cap_exceeded,
  domain_error,
  not_normalized,
  out_of_range,
  no_essential_states,
  max_iterations,
  not_irreducible,
  zero_edge_weight,
  inadmissible_word,
  no_admissible_support,
  non_periodic_weights,
  grid_too_coarse,
  invalid_tree,
  invalid_model,
  io_error,
};

const char* errc_name(errc code) noexcept;

/// Library-wide exception. `code()` is stable and machine readable,
/// `detail()` is free-form context for humans and JSON error payloads.
class Error : public std::runtime_error {
 public:
  Error(errc code, std::string detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(std::move(detail)) {}

  errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(errc code, std::string detail) {
  throw Error(code, std::move(detail));
}

}  // namespace shiftspec
