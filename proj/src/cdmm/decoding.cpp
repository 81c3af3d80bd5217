#include "cdmm/decoding.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "cdmm/poly.hpp"

namespace cdmm {
namespace {

using i64 = std::int64_t;

ResponseSet sorted_by_worker(const ResponseSet& responses) {
  ResponseSet s = responses;
  std::sort(s.begin(), s.end(), [](const Response& a, const Response& b) { return a.worker < b.worker; });
  return s;
}

bool has_duplicate_points(const ResponseSet& responses) {
  std::vector<u64> pts;
  pts.reserve(responses.size());
  for (const auto& r : responses) pts.push_back(r.point);
  std::sort(pts.begin(), pts.end());
  return std::adjacent_find(pts.begin(), pts.end()) != pts.end();
}

bool divides_group_order(const PrimeField& f, std::size_t k) {
  return k != 0 && (f.modulus() - 1) % k == 0;
}

// Values at r*zeta^i for i = 0..k-1 taken from `by_point`; false if any is missing.
bool gather_coset(const PrimeField& f, const std::unordered_map<u64, const Matrix*>& by_point,
                  u64 r, u64 zeta, std::size_t k, std::vector<const Matrix*>& values) {
  values.assign(k, nullptr);
  u64 x = r;
  for (std::size_t i = 0; i < k; ++i) {
    auto it = by_point.find(x);
    if (it == by_point.end()) return false;
    values[i] = it->second;
    x = f.mul(x, zeta);
  }
  return true;
}

BlockGrid read_blocks(const ExponentLayout& layout, const std::vector<Matrix>& coeffs, i64 offset = 0) {
  BlockGrid out(layout.K1(), layout.K2());
  for (std::size_t i = 0; i < layout.K1(); ++i)
    for (std::size_t j = 0; j < layout.K2(); ++j)
      out(i, j) = coeffs[static_cast<std::size_t>(layout.c_exponent(i, j) - offset)];
  return out;
}

void throw_on(ErrorCode code, const char* what) {
  if (code != ErrorCode::ok) fail(code, what);
}

}  // namespace

Response make_response(std::size_t worker, u64 point, Matrix product) {
  return {worker, point, std::make_shared<const Matrix>(std::move(product))};
}

const char* to_string(DecodePath path) {
  switch (path) {
    case DecodePath::grouped: return "grouped";
    case DecodePath::modulo: return "modulo";
    case DecodePath::lrc: return "lrc";
    case DecodePath::full: return "full";
    case DecodePath::dft: return "dft";
  }
  return "?";
}

ErrorCode try_decode_full(const PrimeField& f, const ExponentLayout& layout,
                          const ResponseSet& responses, BlockGrid& out) {
  if (layout.min_degree < 0) return ErrorCode::bad_params;
  const std::size_t need = static_cast<std::size_t>(layout.product_degree + 1);
  if (responses.size() < need) return ErrorCode::insufficient_responses;
  ResponseSet chosen = sorted_by_worker(responses);
  chosen.resize(need);
  if (has_duplicate_points(chosen)) return ErrorCode::duplicate_points;

  std::vector<u64> points;
  std::vector<const Matrix*> values;
  for (const auto& r : chosen) {
    points.push_back(r.point);
    values.push_back(r.product.get());
  }
  std::vector<std::size_t> degrees;
  for (i64 c : layout.c_exponent) degrees.push_back(static_cast<std::size_t>(c));
  const Grid<u64> w = interpolation_weights(f, points, degrees);
  out = BlockGrid(layout.K1(), layout.K2());
  std::size_t t = 0;
  for (std::size_t i = 0; i < layout.K1(); ++i) {
    for (std::size_t j = 0; j < layout.K2(); ++j, ++t) {
      std::vector<u64> row(w.row(t).begin(), w.row(t).end());
      out(i, j) = linear_combination(f, row, values);
    }
  }
  return ErrorCode::ok;
}

ErrorCode try_decode_modulo(const PrimeField& f, const ExponentLayout& layout,
                            const ResponseSet& responses, std::size_t k, u64 gamma, BlockGrid& out) {
  if (layout.min_degree < 0 || k == 0) return ErrorCode::bad_params;
  const i64 n = layout.product_degree;
  const i64 kk = static_cast<i64>(k);
  for (i64 c : layout.c_exponent) {
    if (c < n + 1 - kk || c > kk - 1) return ErrorCode::band_violation;
  }
  if (!divides_group_order(f, k)) return ErrorCode::order_not_supported;
  if (gamma == 0) return ErrorCode::zero_scale;

  std::unordered_map<u64, const Matrix*> coset;
  u64 r = 0;
  for (const auto& resp : sorted_by_worker(responses)) {
    if (f.pow(resp.point, k) != gamma) continue;
    if (coset.emplace(resp.point, resp.product.get()).second && (r == 0 || resp.point < r)) r = resp.point;
  }
  if (coset.size() < k) return ErrorCode::incomplete_coset;
  std::vector<const Matrix*> values;
  const u64 zeta = root_of_unity(f, k);
  if (!gather_coset(f, coset, r, zeta, k, values)) return ErrorCode::incomplete_coset;
  const auto coeffs = transform_entries(values, [&](const std::vector<u64>& v) {
    return coset_idft(f, v, zeta, r);
  });
  out = read_blocks(layout, coeffs);
  return ErrorCode::ok;
}

ErrorCode try_decode_grouped(const PrimeField& f, const ExponentLayout& layout,
                             const ResponseSet& responses, std::size_t g, BlockGrid& out) {
  if (!grouped_extraction_valid(layout, g)) return ErrorCode::bad_params;
  const std::size_t need = groups_needed(layout, g);
  if (responses.size() < need * g) return ErrorCode::insufficient_groups;
  if (!divides_group_order(f, g)) return ErrorCode::order_not_supported;

  // Collect cosets keyed by gamma = x^g, remembering first arrival by worker index.
  struct Coset {
    std::size_t first_worker;
    std::unordered_map<u64, const Matrix*> members;
    u64 min_point;
  };
  std::map<u64, Coset> cosets;
  for (const auto& resp : sorted_by_worker(responses)) {
    const u64 gamma = f.pow(resp.point, g);
    if (gamma == 0) continue;
    auto [it, inserted] = cosets.try_emplace(gamma, Coset{resp.worker, {}, resp.point});
    it->second.members.emplace(resp.point, resp.product.get());
    it->second.min_point = std::min(it->second.min_point, resp.point);
  }
  std::vector<std::pair<std::size_t, u64>> complete;  // (first worker, gamma)
  std::size_t incomplete = 0;
  for (const auto& [gamma, c] : cosets) {
    if (c.members.size() == g)
      complete.emplace_back(c.first_worker, gamma);
    else
      ++incomplete;
  }
  if (complete.size() < need) {
    return complete.size() + incomplete >= need ? ErrorCode::incomplete_group : ErrorCode::insufficient_groups;
  }
  std::sort(complete.begin(), complete.end());
  complete.resize(need);

  const u64 zeta = root_of_unity(f, g);
  std::vector<u64> gammas;
  std::vector<Matrix> collapsed;
  std::vector<const Matrix*> values;
  for (const auto& [first, gamma] : complete) {
    const Coset& c = cosets.at(gamma);
    if (!gather_coset(f, c.members, c.min_point, zeta, g, values)) return ErrorCode::incomplete_group;
    const auto rem = transform_entries(values, [&](const std::vector<u64>& v) {
      return coset_idft(f, v, zeta, c.min_point);
    });
    gammas.push_back(gamma);
    collapsed.push_back(rem[g - 1]);
  }
  std::vector<std::size_t> degrees;
  for (i64 c : layout.c_exponent) degrees.push_back(static_cast<std::size_t>((c - static_cast<i64>(g) + 1) / static_cast<i64>(g)));
  const Grid<u64> w = interpolation_weights(f, gammas, degrees);
  std::vector<const Matrix*> ptrs;
  for (const auto& m : collapsed) ptrs.push_back(&m);
  out = BlockGrid(layout.K1(), layout.K2());
  std::size_t t = 0;
  for (std::size_t i = 0; i < layout.K1(); ++i) {
    for (std::size_t j = 0; j < layout.K2(); ++j, ++t) {
      std::vector<u64> row(w.row(t).begin(), w.row(t).end());
      out(i, j) = linear_combination(f, row, ptrs);
    }
  }
  return ErrorCode::ok;
}

std::vector<Matrix> repair_group(const PrimeField& f, const std::vector<u64>& group_points,
                                 const std::vector<std::pair<std::size_t, Matrix>>& known,
                                 std::size_t r) {
  if (known.size() < r || r == 0) fail(ErrorCode::insufficient_local_responses, "fewer than r products known in group");
  std::vector<std::pair<std::size_t, const Matrix*>> basis;
  for (const auto& [idx, mat] : known) {
    if (idx >= group_points.size()) fail(ErrorCode::invalid_argument, "known index outside the group");
    basis.emplace_back(idx, &mat);
  }
  std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  basis.erase(std::unique(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              basis.end());
  if (basis.size() < r) fail(ErrorCode::insufficient_local_responses, "fewer than r distinct products known in group");
  basis.resize(r);

  std::vector<Matrix> out(group_points.size());
  std::vector<bool> have(group_points.size(), false);
  for (const auto& [idx, mat] : known) {
    out[idx] = mat;
    have[idx] = true;
  }
  std::vector<const Matrix*> mats;
  for (const auto& b : basis) mats.push_back(b.second);
  for (std::size_t z = 0; z < group_points.size(); ++z) {
    if (have[z]) continue;
    // Lagrange basis of the r chosen points evaluated at the missing point.
    std::vector<u64> weights(r);
    for (std::size_t i = 0; i < r; ++i) {
      u64 num = 1, den = 1;
      const u64 xi = group_points[basis[i].first];
      for (std::size_t j = 0; j < r; ++j) {
        if (j == i) continue;
        const u64 xj = group_points[basis[j].first];
        num = f.mul(num, f.sub(group_points[z], xj));
        den = f.mul(den, f.sub(xi, xj));
      }
      weights[i] = f.mul(num, f.inv(den));
    }
    out[z] = linear_combination(f, weights, mats);
  }
  return out;
}

ErrorCode try_decode_lrc(const PrimeField& f, const ExponentLayout& layout, const LrcLayout& lrc,
                         const ResponseSet& responses, BlockGrid& out) {
  const std::size_t k = layout.modulo_order;
  if (k == 0 || lrc.groups.size() != lrc.group_count) return ErrorCode::bad_params;
  if (!divides_group_order(f, k)) return ErrorCode::order_not_supported;
  if (responses.size() < lrc.group_count * lrc.r) return ErrorCode::unrepairable_group;
  const u64 zeta = root_of_unity(f, k);
  std::unordered_map<u64, const Matrix*> by_point;
  for (const auto& resp : responses) by_point.emplace(resp.point, resp.product.get());

  std::vector<u64> all_points(k);
  for (std::size_t w = 0; w < k; ++w) all_points[w] = f.pow(zeta, w);
  std::vector<Matrix> full(k);
  for (const auto& group : lrc.groups) {
    std::vector<u64> pts;
    std::vector<std::pair<std::size_t, Matrix>> known;
    for (std::size_t t = 0; t < group.size(); ++t) {
      pts.push_back(all_points[group[t]]);
      if (auto it = by_point.find(pts.back()); it != by_point.end()) known.emplace_back(t, *it->second);
    }
    if (known.size() < lrc.r) return ErrorCode::unrepairable_group;
    auto repaired = repair_group(f, pts, known, lrc.r);
    for (std::size_t t = 0; t < group.size(); ++t) full[group[t]] = std::move(repaired[t]);
  }
  ResponseSet complete;
  for (std::size_t w = 0; w < k; ++w) complete.push_back(make_response(w, all_points[w], std::move(full[w])));
  return try_decode_modulo(f, layout, complete, k, 1, out);
}

ErrorCode try_decode_dft(const PrimeField& f, const ExponentLayout& layout,
                         const ResponseSet& responses, BlockGrid& out) {
  const std::size_t m = layout.m();
  if (layout.params.kind != SchemeKind::DFT) return ErrorCode::bad_params;
  if (!divides_group_order(f, m)) return ErrorCode::order_not_supported;
  if (responses.size() < m) return ErrorCode::incomplete;
  std::unordered_map<u64, const Matrix*> by_point;
  for (const auto& resp : responses) by_point.emplace(resp.point, resp.product.get());
  std::vector<const Matrix*> values;
  if (!gather_coset(f, by_point, 1, root_of_unity(f, m), m, values)) return ErrorCode::incomplete;
  const u64 m_inv = f.inv(m % f.modulus());
  out = BlockGrid(1, 1);
  out(0, 0) = linear_combination(f, std::vector<u64>(m, m_inv), values);
  return ErrorCode::ok;
}

BlockGrid decode_full(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses) {
  BlockGrid out;
  throw_on(try_decode_full(f, layout, responses, out), "full interpolation failed");
  return out;
}

BlockGrid decode_modulo(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses,
                        std::size_t k, u64 gamma) {
  BlockGrid out;
  throw_on(try_decode_modulo(f, layout, responses, k, gamma, out), "modulo decoding failed");
  return out;
}

BlockGrid decode_grouped(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses,
                         std::size_t group_size) {
  BlockGrid out;
  throw_on(try_decode_grouped(f, layout, responses, group_size, out), "grouped decoding failed");
  return out;
}

Matrix decode_lrc(const PrimeField& f, const ExponentLayout& layout, const LrcLayout& lrc,
                  const ResponseSet& responses) {
  BlockGrid out;
  throw_on(try_decode_lrc(f, layout, lrc, responses, out), "local repair decoding failed");
  return out(0, 0);
}

Matrix decode_dft(const PrimeField& f, const ExponentLayout& layout, const ResponseSet& responses) {
  BlockGrid out;
  throw_on(try_decode_dft(f, layout, responses, out), "DFT decoding needs all m responses");
  return out(0, 0);
}

std::vector<DecodePath> decode_paths(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::EP: return {DecodePath::grouped, DecodePath::full};
    case SchemeKind::SEP:
    case SchemeKind::PS:
    case SchemeKind::TSEP: return {DecodePath::modulo, DecodePath::full};
    case SchemeKind::LRC: return {DecodePath::lrc, DecodePath::full};
    case SchemeKind::DFT: return {DecodePath::dft};
    case SchemeKind::POLY:
    case SchemeKind::MATDOT:
    case SchemeKind::LRC_SECURE: return {DecodePath::full};
  }
  return {DecodePath::full};
}

DecodeContext make_decode_context(const PrimeField& f, const SchemeParams& params) {
  DecodeContext ctx{f, make_layout(params), make_lrc_layout(params), decode_paths(params.kind)};
  return ctx;
}

ErrorCode try_decode_path(const DecodeContext& ctx, DecodePath path, const ResponseSet& responses,
                          BlockGrid& out) {
  switch (path) {
    case DecodePath::full: return try_decode_full(ctx.field, ctx.layout, responses, out);
    case DecodePath::modulo:
      return try_decode_modulo(ctx.field, ctx.layout, responses, ctx.layout.modulo_order, 1, out);
    case DecodePath::grouped:
      return try_decode_grouped(ctx.field, ctx.layout, responses, ctx.layout.group_size, out);
    case DecodePath::lrc:
      if (!ctx.lrc) return ErrorCode::bad_params;
      return try_decode_lrc(ctx.field, ctx.layout, *ctx.lrc, responses, out);
    case DecodePath::dft: return try_decode_dft(ctx.field, ctx.layout, responses, out);
  }
  return ErrorCode::bad_params;
}

DecodeAttempt try_decode_any(const DecodeContext& ctx, const ResponseSet& responses) {
  DecodeAttempt attempt;
  for (DecodePath path : ctx.paths) {
    const ErrorCode code = try_decode_path(ctx, path, responses, attempt.blocks);
    if (code == ErrorCode::ok) {
      attempt.status = code;
      attempt.path = path;
      return attempt;
    }
  }
  attempt.status = ErrorCode::undecodable;
  attempt.blocks = BlockGrid();
  return attempt;
}

}  // namespace cdmm
