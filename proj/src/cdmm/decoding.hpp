#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cdmm/schemes.hpp"

namespace cdmm {

struct Response {
  std::size_t worker = 0;
  u64 point = 0;
  std::shared_ptr<const Matrix> product;
};

using ResponseSet = std::vector<Response>;

Response make_response(std::size_t worker, u64 point, Matrix product);

enum class DecodePath { grouped, modulo, lrc, full, dft };
const char* to_string(DecodePath path);

/// Interpolates the whole product polynomial from the product_degree + 1
/// responses with the smallest worker indices.
BlockGrid decode_full(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses);
/// Reads the needed coefficients of p_C mod (x^k - gamma) from the k points of
/// the coset x^k = gamma.
BlockGrid decode_modulo(const PrimeField& f, const ExponentLayout& layout,
                        const ResponseSet& responses, std::size_t k, u64 gamma = 1);
/// Collapses each complete coset x^g = gamma to one evaluation of the
/// block-coefficient polynomial, then interpolates across cosets.
BlockGrid decode_grouped(const PrimeField& f, const ExponentLayout& layout,
                         const ResponseSet& responses, std::size_t group_size);
/// Fills the missing products of one local group from any r known ones.
/// `known` pairs index into group_points with the product at that point.
std::vector<Matrix> repair_group(const PrimeField& f, const std::vector<u64>& group_points,
                                 const std::vector<std::pair<std::size_t, Matrix>>& known,
                                 std::size_t r);
/// Local repair of every group followed by modulo extraction of A*B.
Matrix decode_lrc(const PrimeField& f, const ExponentLayout& layout, const LrcLayout& lrc,
                  const ResponseSet& responses);
/// Average of the m responses at the m-th roots of unity.
Matrix decode_dft(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses);

/// Non-throwing variants for enumeration loops; ErrorCode::ok on success.
ErrorCode try_decode_full(const PrimeField& f, const ExponentLayout& layout,
                          const ResponseSet& responses, BlockGrid& out);
ErrorCode try_decode_modulo(const PrimeField& f, const ExponentLayout& layout,
                            const ResponseSet& responses, std::size_t k, u64 gamma, BlockGrid& out);
ErrorCode try_decode_grouped(const PrimeField& f, const ExponentLayout& layout,
                             const ResponseSet& responses, std::size_t group_size, BlockGrid& out);
ErrorCode try_decode_lrc(const PrimeField& f, const ExponentLayout& layout, const LrcLayout& lrc,
                         const ResponseSet& responses, BlockGrid& out);
ErrorCode try_decode_dft(const PrimeField& f, const ExponentLayout& layout,
                         const ResponseSet& responses, BlockGrid& out);

/// Everything a master needs to decode one scheme instance.
struct DecodeContext {
  PrimeField field;
  ExponentLayout layout;
  std::optional<LrcLayout> lrc;
  std::vector<DecodePath> paths;  // in priority order
};

DecodeContext make_decode_context(const PrimeField& f, const SchemeParams& params);
/// Paths implemented for a scheme kind, highest priority first.
std::vector<DecodePath> decode_paths(SchemeKind kind);

struct DecodeAttempt {
  ErrorCode status = ErrorCode::undecodable;
  DecodePath path = DecodePath::full;
  BlockGrid blocks;
};

ErrorCode try_decode_path(const DecodeContext& ctx, DecodePath path, const ResponseSet& responses,
                          BlockGrid& out);
/// Tries every path in priority order; returns the first success.
DecodeAttempt try_decode_any(const DecodeContext& ctx, const ResponseSet& responses);

}  // namespace cdmm
