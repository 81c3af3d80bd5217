#pragma once

#include <stdexcept>
#include <string>

namespace cdmm {

// Numeric values are part of the C ABI (see include/cdmm/cdmm.h).
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  search_bound_exceeded = 2,
  order_not_supported = 3,
  order_mismatch = 4,
  not_invertible = 5,
  zero_scale = 6,
  duplicate_points = 7,
  indivisible_dimensions = 8,
  shape_mismatch = 9,
  bad_params = 10,
  missing_noise = 11,
  insufficient_responses = 12,
  band_violation = 13,
  incomplete_coset = 14,
  insufficient_groups = 15,
  incomplete_group = 16,
  insufficient_local_responses = 17,
  unrepairable_group = 18,
  incomplete = 19,
  subset_size_mismatch = 20,
  too_large = 21,
  undecodable = 22,
  codec_overflow = 23,
  config_parse_error = 24,
  io_error = 25,
  field_mismatch = 26,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace cdmm
