#include "cdmm/error.hpp"

namespace cdmm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::search_bound_exceeded: return "search-bound-exceeded";
    case ErrorCode::order_not_supported: return "order-not-supported";
    case ErrorCode::order_mismatch: return "order-mismatch";
    case ErrorCode::not_invertible: return "K-not-invertible";
    case ErrorCode::zero_scale: return "zero-scale";
    case ErrorCode::duplicate_points: return "duplicate-points";
    case ErrorCode::indivisible_dimensions: return "indivisible-dimensions";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::bad_params: return "bad-params";
    case ErrorCode::missing_noise: return "missing-noise";
    case ErrorCode::insufficient_responses: return "insufficient-responses";
    case ErrorCode::band_violation: return "band-violation";
    case ErrorCode::incomplete_coset: return "incomplete-coset";
    case ErrorCode::insufficient_groups: return "insufficient-groups";
    case ErrorCode::incomplete_group: return "incomplete-group";
    case ErrorCode::insufficient_local_responses: return "insufficient-local-responses";
    case ErrorCode::unrepairable_group: return "unrepairable-group";
    case ErrorCode::incomplete: return "incomplete";
    case ErrorCode::subset_size_mismatch: return "subset-size-mismatch";
    case ErrorCode::too_large: return "too-large";
    case ErrorCode::undecodable: return "undecodable";
    case ErrorCode::codec_overflow: return "codec-overflow";
    case ErrorCode::config_parse_error: return "config-parse-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::field_mismatch: return "field-mismatch";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace cdmm
