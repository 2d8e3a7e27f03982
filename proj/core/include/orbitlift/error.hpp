#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orbitlift {

enum class ErrorKind {
  unknown_family,
  bad_params,
  cap_exceeded,
  not_orthogonal,
  not_finite,
  tolerance_ambiguity,
  certification_failed,
  cap_too_low,
  not_invariant,
  not_in_algebra,
  field_overflow,
  not_hyperbolic,
  grid_too_coarse,
  inconclusive,
  order_too_low,
  not_in_image,
  newton_diverged,
  seed_mismatch,
  no_match,
  recursion_depth_exceeded,
  multiset_mismatch,
  no_overlap,
  inconsistent,
  not_a_section,
  not_polar,
  parse_error,
  io_error,
  invalid_argument,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace orbitlift
