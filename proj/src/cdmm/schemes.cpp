#include "cdmm/schemes.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cdmm {
namespace {

using i64 = std::int64_t;

i64 as_i64(std::size_t v) { return static_cast<i64>(v); }

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::bad_params, msg); }

std::size_t hat_first(const SchemeParams& p) { return (p.K2 + 1) * (p.K1 * p.m + p.X) - 1; }
std::size_t hat_second(const SchemeParams& p) { return (p.K1 + 1) * (p.K2 * p.m + p.X) - 1; }

Orientation resolve_orientation(const SchemeParams& p) {
  if (p.orientation != Orientation::automatic) return p.orientation;
  return hat_first(p) <= hat_second(p) ? Orientation::first : Orientation::second;
}

std::size_t lrc_h(const SchemeParams& p) { return (p.r + 1) / 2; }
std::size_t lrc_g(const SchemeParams& p) { return p.r + p.delta - 1; }
std::size_t lrc_l(const SchemeParams& p) { return p.m / lrc_h(p); }

ExponentLayout blank_layout(const SchemeParams& p, std::size_t x) {
  ExponentLayout l;
  l.params = p;
  l.alpha = ExponentGrid(p.K1, p.m);
  l.beta = ExponentGrid(p.m, p.K2);
  l.c_exponent = ExponentGrid(p.K1, p.K2);
  l.theta.assign(x, 0);
  l.eta.assign(x, 0);
  return l;
}

void finish_degrees(ExponentLayout& l) {
  l.product_degree = max_exponent_sum(l);
  i64 min_a = *std::min_element(l.alpha.begin(), l.alpha.end());
  i64 min_b = *std::min_element(l.beta.begin(), l.beta.end());
  for (i64 t : l.theta) min_a = std::min(min_a, t);
  for (i64 t : l.eta) min_b = std::min(min_b, t);
  l.min_degree = std::min<i64>(0, min_a + min_b);
}

// Term label at a product degree: C block index when useful, -1 otherwise.
std::map<i64, std::vector<i64>> product_support(const ExponentLayout& l) {
  struct Side {
    i64 exponent;
    i64 outer;  // row of A block / column of B block, -1 for noise
    i64 inner;  // shared index k
  };
  std::vector<Side> a_terms, b_terms;
  for (std::size_t j = 0; j < l.alpha.rows(); ++j)
    for (std::size_t k = 0; k < l.alpha.cols(); ++k) a_terms.push_back({l.alpha(j, k), as_i64(j), as_i64(k)});
  for (i64 t : l.theta) a_terms.push_back({t, -1, -1});
  for (std::size_t k = 0; k < l.beta.rows(); ++k)
    for (std::size_t j = 0; j < l.beta.cols(); ++j) b_terms.push_back({l.beta(k, j), as_i64(j), as_i64(k)});
  for (i64 t : l.eta) b_terms.push_back({t, -1, -1});

  std::map<i64, std::vector<i64>> support;
  const i64 k2 = as_i64(l.beta.cols());
  for (const Side& a : a_terms) {
    for (const Side& b : b_terms) {
      const bool useful = a.outer >= 0 && b.outer >= 0 && a.inner == b.inner;
      support[a.exponent + b.exponent].push_back(useful ? a.outer * k2 + b.outer : -1);
    }
  }
  return support;
}

void check_common(const SchemeParams& p) {
  if (p.K1 == 0 || p.K2 == 0 || p.m == 0) bad("block counts must be positive");
}

}  // namespace

const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::POLY: return "POLY";
    case SchemeKind::MATDOT: return "MATDOT";
    case SchemeKind::EP: return "EP";
    case SchemeKind::SEP: return "SEP";
    case SchemeKind::PS: return "PS";
    case SchemeKind::TSEP: return "TSEP";
    case SchemeKind::DFT: return "DFT";
    case SchemeKind::LRC: return "LRC";
    case SchemeKind::LRC_SECURE: return "LRC_SECURE";
  }
  return "?";
}

SchemeKind parse_kind(const std::string& name) {
  for (SchemeKind k : {SchemeKind::POLY, SchemeKind::MATDOT, SchemeKind::EP, SchemeKind::SEP,
                       SchemeKind::PS, SchemeKind::TSEP, SchemeKind::DFT, SchemeKind::LRC,
                       SchemeKind::LRC_SECURE}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorCode::config_parse_error, "unknown scheme kind '" + name + "'");
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::automatic: return "auto";
    case Orientation::first: return "first";
    case Orientation::second: return "second";
  }
  return "?";
}

Orientation parse_orientation(const std::string& name) {
  if (name == "auto") return Orientation::automatic;
  if (name == "first") return Orientation::first;
  if (name == "second") return Orientation::second;
  fail(ErrorCode::config_parse_error, "unknown orientation '" + name + "'");
}

void validate_params(const SchemeParams& p) {
  check_common(p);
  switch (p.kind) {
    case SchemeKind::MATDOT:
      if (p.K1 != 1 || p.K2 != 1) bad("MATDOT requires K1 = K2 = 1");
      if (p.X != 0) bad("MATDOT requires X = 0");
      break;
    case SchemeKind::POLY:
      if (p.m != 1) bad("POLY requires m = 1");
      if (p.X != 0) bad("POLY requires X = 0");
      break;
    case SchemeKind::EP:
      if (p.X != 0) bad("EP requires X = 0");
      break;
    case SchemeKind::SEP:
    case SchemeKind::PS:
    case SchemeKind::TSEP:
      if (p.X == 0) bad(std::string(to_string(p.kind)) + " requires X >= 1");
      break;
    case SchemeKind::DFT:
      if (p.X != 0) bad("DFT requires X = 0");
      if (p.K1 != 1 || p.K2 != 1) bad("DFT requires K1 = K2 = 1");
      if (p.N != 0 && p.N != p.m) bad("DFT requires N = m");
      break;
    case SchemeKind::LRC:
    case SchemeKind::LRC_SECURE: {
      if (p.K1 != 1 || p.K2 != 1) bad("LRC codes require K1 = K2 = 1");
      if (p.r == 0 || p.r % 2 == 0) bad("LRC locality r must be odd");
      if (p.r > 2 * p.m - 1) bad("LRC locality r must be at most 2m - 1");
      if (p.delta < 1) bad("LRC delta must be at least 1");
      if (p.m % lrc_h(p) != 0) bad("(r + 1) / 2 must divide m");
      const std::size_t g = lrc_g(p);
      if (p.kind == SchemeKind::LRC) {
        if (p.X != 0) bad("LRC requires X = 0; use LRC_SECURE");
        if (p.N != 0 && p.N != g * lrc_l(p)) bad("LRC requires N = (r + delta - 1) * 2m / (r + 1)");
      } else {
        if (p.X == 0) bad("LRC_SECURE requires X >= 1");
        if (p.X > lrc_h(p)) bad("LRC_SECURE requires X <= (r + 1) / 2");
        if (p.N != 0 && p.N % g != 0) bad("(r + delta - 1) must divide N");
      }
      break;
    }
  }
  if (p.N != 0 && p.kind != SchemeKind::DFT && p.kind != SchemeKind::LRC) {
    if (p.N < theoretical_thresholds(p).worst) bad("N is below the worst recovery threshold");
  }
}

SchemeParams params_from_config(const Config& cfg) {
  static const std::vector<std::string> known = {"kind", "K1", "K2", "m", "X", "r", "delta",
                                                 "N", "seed", "modulus", "orientation"};
  for (const auto& [key, value] : cfg.values()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(ErrorCode::config_parse_error, "unknown scheme key '" + key + "'");
    }
  }
  SchemeParams p;
  auto kind = cfg.get("kind");
  if (!kind) fail(ErrorCode::config_parse_error, "missing 'kind'");
  p.kind = parse_kind(*kind);
  p.K1 = cfg.get_uint("K1", 1);
  p.K2 = cfg.get_uint("K2", 1);
  p.m = cfg.get_uint("m", 1);
  p.X = cfg.get_uint("X", 0);
  p.r = cfg.get_uint("r", 0);
  p.delta = cfg.get_uint("delta", 0);
  p.N = cfg.get_uint("N", 0);
  p.seed = cfg.get_uint("seed", 0);
  const std::string modulus = cfg.get_or("modulus", "auto");
  p.modulus = modulus == "auto" ? 0 : static_cast<u64>(parse_int(modulus, "modulus"));
  p.orientation = parse_orientation(cfg.get_or("orientation", "auto"));
  return p;
}

std::string params_to_config(const SchemeParams& p) {
  std::ostringstream out;
  out << "kind=" << to_string(p.kind) << '\n'
      << "K1=" << p.K1 << '\n'
      << "K2=" << p.K2 << '\n'
      << "m=" << p.m << '\n'
      << "X=" << p.X << '\n'
      << "r=" << p.r << '\n'
      << "delta=" << p.delta << '\n'
      << "N=" << p.N << '\n'
      << "seed=" << p.seed << '\n'
      << "modulus=";
  if (p.modulus == 0)
    out << "auto";
  else
    out << p.modulus;
  out << '\n' << "orientation=" << to_string(p.orientation) << '\n';
  return out.str();
}

ExponentLayout layout_ep(const SchemeParams& p) {
  check_common(p);
  if (p.X != 0) bad("entangled layout requires X = 0");
  ExponentLayout l = blank_layout(p, 0);
  const i64 m = as_i64(p.m), k1 = as_i64(p.K1);
  for (std::size_t j = 0; j < p.K1; ++j)
    for (std::size_t k = 0; k < p.m; ++k) l.alpha(j, k) = as_i64(k) + as_i64(j) * m;
  for (std::size_t j = 0; j < p.m; ++j)
    for (std::size_t k = 0; k < p.K2; ++k) l.beta(j, k) = (m - 1 - as_i64(j)) + as_i64(k) * k1 * m;
  for (std::size_t i = 0; i < p.K1; ++i)
    for (std::size_t j = 0; j < p.K2; ++j) l.c_exponent(i, j) = m - 1 + as_i64(i) * m + as_i64(j) * k1 * m;
  l.orientation = Orientation::first;
  finish_degrees(l);
  if (p.kind == SchemeKind::EP) {
    l.group_size = p.m;
  }
  return l;
}

namespace {

// First orientation of the secure entangled layout; `tsep` selects the
// column-ordered A placement.
ExponentLayout secure_first(const SchemeParams& p, bool tsep) {
  ExponentLayout l = blank_layout(p, p.X);
  const i64 m = as_i64(p.m), k1 = as_i64(p.K1), k2 = as_i64(p.K2), x = as_i64(p.X);
  const i64 stride = k1 * m + x;
  for (std::size_t j = 0; j < p.K1; ++j)
    for (std::size_t k = 0; k < p.m; ++k)
      l.alpha(j, k) = tsep ? as_i64(k) * k1 + as_i64(j) : as_i64(k) + as_i64(j) * m;
  for (std::size_t j = 0; j < p.m; ++j)
    for (std::size_t k = 0; k < p.K2; ++k)
      l.beta(j, k) = (tsep ? (m - 1 - as_i64(j)) * k1 : (m - 1 - as_i64(j))) + as_i64(k) * stride;
  for (std::size_t t = 0; t < p.X; ++t) {
    l.theta[t] = k1 * m + as_i64(t);
    l.eta[t] = (k2 - 1) * stride + k1 * m + as_i64(t);
  }
  for (std::size_t i = 0; i < p.K1; ++i)
    for (std::size_t j = 0; j < p.K2; ++j)
      l.c_exponent(i, j) = (tsep ? (m - 1) * k1 + as_i64(i) : m - 1 + as_i64(i) * m) + as_i64(j) * stride;
  l.orientation = Orientation::first;
  return l;
}

// Mirror image: encode C^T = B^T A^T with the first orientation and transpose
// the roles back.
ExponentLayout secure_second(const SchemeParams& p, bool tsep) {
  SchemeParams swapped = p;
  std::swap(swapped.K1, swapped.K2);
  const ExponentLayout t = secure_first(swapped, tsep);
  ExponentLayout l = blank_layout(p, p.X);
  for (std::size_t i = 0; i < p.K1; ++i)
    for (std::size_t j = 0; j < p.m; ++j) l.alpha(i, j) = t.beta(j, i);
  for (std::size_t j = 0; j < p.m; ++j)
    for (std::size_t k = 0; k < p.K2; ++k) l.beta(j, k) = t.alpha(k, j);
  l.theta = t.eta;
  l.eta = t.theta;
  for (std::size_t i = 0; i < p.K1; ++i)
    for (std::size_t k = 0; k < p.K2; ++k) l.c_exponent(i, k) = t.c_exponent(k, i);
  l.orientation = Orientation::second;
  return l;
}

}  // namespace

ExponentLayout entangled_layout(std::size_t K1, std::size_t K2, std::size_t m, std::size_t X,
                                bool column_ordered) {
  SchemeParams p;
  p.kind = column_ordered ? SchemeKind::TSEP : SchemeKind::SEP;
  p.K1 = K1;
  p.K2 = K2;
  p.m = m;
  p.X = X;
  p.orientation = Orientation::first;
  check_common(p);
  ExponentLayout l = secure_first(p, column_ordered);
  finish_degrees(l);
  const std::size_t reduction = column_ordered ? K1 * (m - 1) : m - 1;
  l.modulo_order = static_cast<std::size_t>(l.product_degree + 1) - reduction;
  return l;
}

ExponentLayout layout_sep(const SchemeParams& p) {
  check_common(p);
  if (p.X == 0) bad("secure layout requires X >= 1");
  const Orientation o = resolve_orientation(p);
  ExponentLayout l = o == Orientation::first ? secure_first(p, false) : secure_second(p, false);
  finish_degrees(l);
  l.modulo_order = static_cast<std::size_t>(l.product_degree + 1) - p.m + 1;
  return l;
}

ExponentLayout layout_ps(const SchemeParams& p) {
  check_common(p);
  if (p.X == 0) bad("secure layout requires X >= 1");
  SchemeParams plain = p;
  plain.X = 0;
  ExponentLayout l = layout_ep(plain);
  l.params = p;
  l.group_size = 0;
  const i64 base = as_i64(p.K1 * p.K2 * p.m);
  l.theta.resize(p.X);
  l.eta.resize(p.X);
  for (std::size_t t = 0; t < p.X; ++t) l.theta[t] = l.eta[t] = base + as_i64(t);
  finish_degrees(l);
  l.modulo_order = static_cast<std::size_t>(l.product_degree + 1) - p.m + 1;
  return l;
}

ExponentLayout layout_tsep(const SchemeParams& p) {
  check_common(p);
  if (p.X == 0) bad("secure layout requires X >= 1");
  const Orientation o = resolve_orientation(p);
  ExponentLayout l = o == Orientation::first ? secure_first(p, true) : secure_second(p, true);
  finish_degrees(l);
  const std::size_t reduction = (o == Orientation::first ? p.K1 : p.K2) * (p.m - 1);
  l.modulo_order = static_cast<std::size_t>(l.product_degree + 1) - reduction;
  return l;
}

std::pair<ExponentLayout, LrcLayout> layout_lrc(const SchemeParams& p) {
  validate_params(SchemeParams{p.kind, p.K1, p.K2, p.m, p.X, p.r, p.delta, 0, 0, 0, p.orientation});
  const std::size_t h = lrc_h(p), g = lrc_g(p), groups = lrc_l(p);
  const bool secure = p.kind == SchemeKind::LRC_SECURE;
  ExponentLayout l = blank_layout(p, secure ? p.X : 0);
  for (std::size_t k = 0; k < p.m; ++k) {
    l.alpha(0, k) = as_i64(k % h + (k / h) * g);
    const std::size_t q = p.m - 1 - k;
    l.beta(k, 0) = as_i64(q % h + (q / h) * g);
  }
  for (std::size_t t = 0; t < l.theta.size(); ++t) l.theta[t] = l.eta[t] = as_i64(groups * g + t);
  LrcLayout lrc;
  lrc.g_degree = g;
  lrc.group_count = groups;
  lrc.r = p.r;
  lrc.delta = p.delta;
  lrc.ab_coefficient_degree = as_i64(h - 1 + (groups - 1) * g);
  l.c_exponent(0, 0) = lrc.ab_coefficient_degree;
  l.orientation = Orientation::first;
  finish_degrees(l);
  if (!secure) {
    l.modulo_order = g * groups;
    lrc.groups.assign(groups, {});
    for (std::size_t w = 0; w < g * groups; ++w) lrc.groups[w % groups].push_back(w);
  }
  return {l, lrc};
}

ExponentLayout layout_dft(const SchemeParams& p) {
  check_common(p);
  if (p.kind != SchemeKind::DFT) bad("DFT layout requires kind DFT");
  validate_params(p);
  ExponentLayout l = blank_layout(p, 0);
  for (std::size_t k = 0; k < p.m; ++k) {
    l.alpha(0, k) = as_i64(k);
    l.beta(k, 0) = -as_i64(k);
  }
  l.c_exponent(0, 0) = 0;
  l.orientation = Orientation::first;
  finish_degrees(l);
  return l;
}

ExponentLayout make_layout(const SchemeParams& p) {
  validate_params(p);
  switch (p.kind) {
    case SchemeKind::POLY:
    case SchemeKind::MATDOT:
    case SchemeKind::EP: return layout_ep(p);
    case SchemeKind::SEP: return layout_sep(p);
    case SchemeKind::PS: return layout_ps(p);
    case SchemeKind::TSEP: return layout_tsep(p);
    case SchemeKind::DFT: return layout_dft(p);
    case SchemeKind::LRC:
    case SchemeKind::LRC_SECURE: return layout_lrc(p).first;
  }
  bad("unknown kind");
}

std::optional<LrcLayout> make_lrc_layout(const SchemeParams& p) {
  if (p.kind != SchemeKind::LRC) return std::nullopt;
  return layout_lrc(p).second;
}

std::int64_t max_exponent_sum(const ExponentLayout& l) {
  i64 max_a = *std::max_element(l.alpha.begin(), l.alpha.end());
  i64 max_b = *std::max_element(l.beta.begin(), l.beta.end());
  for (i64 t : l.theta) max_a = std::max(max_a, t);
  for (i64 t : l.eta) max_b = std::max(max_b, t);
  return max_a + max_b;
}

bool collision_free(const ExponentLayout& l) {
  const auto support = product_support(l);
  const i64 k2 = as_i64(l.K2());
  for (std::size_t i = 0; i < l.K1(); ++i) {
    for (std::size_t j = 0; j < l.K2(); ++j) {
      const auto it = support.find(l.c_exponent(i, j));
      if (it == support.end() || it->second.size() != l.m()) return false;
      const i64 label = as_i64(i) * k2 + as_i64(j);
      for (i64 t : it->second)
        if (t != label) return false;
    }
  }
  return true;
}

bool grouped_extraction_valid(const ExponentLayout& l, std::size_t g) {
  if (g == 0 || l.min_degree < 0) return false;
  const i64 gg = as_i64(g);
  const i64 k2 = as_i64(l.K2());
  for (std::size_t i = 0; i < l.K1(); ++i)
    for (std::size_t j = 0; j < l.K2(); ++j)
      if (l.c_exponent(i, j) % gg != gg - 1) return false;
  for (const auto& [degree, labels] : product_support(l)) {
    if (degree % gg != gg - 1) continue;
    for (i64 label : labels) {
      if (label < 0) return false;
      if (l.c_exponent(static_cast<std::size_t>(label / k2), static_cast<std::size_t>(label % k2)) != degree) return false;
    }
  }
  return collision_free(l);
}

std::size_t groups_needed(const ExponentLayout& l, std::size_t g) {
  const i64 max_c = *std::max_element(l.c_exponent.begin(), l.c_exponent.end());
  return static_cast<std::size_t>((max_c - as_i64(g) + 1) / as_i64(g)) + 1;
}

namespace {

Matrix encode_side(const PrimeField& f, const ExponentGrid& exps, const BlockGrid& blocks,
                   const std::vector<i64>& noise_exps, const std::vector<Matrix>& noise, u64 x,
                   const char* side) {
  if (blocks.rows() != exps.rows() || blocks.cols() != exps.cols()) {
    fail(ErrorCode::shape_mismatch, std::string(side) + " block grid does not match the layout");
  }
  if (noise.size() != noise_exps.size()) {
    fail(ErrorCode::missing_noise, std::string(side) + " noise count differs from X");
  }
  const Matrix& first = blocks(0, 0);
  Matrix out(first.rows(), first.cols(), 0);
  for (std::size_t j = 0; j < blocks.rows(); ++j)
    for (std::size_t k = 0; k < blocks.cols(); ++k) axpy(f, out, f.pow_signed(x, exps(j, k)), blocks(j, k));
  for (std::size_t t = 0; t < noise.size(); ++t) axpy(f, out, f.pow_signed(x, noise_exps[t]), noise[t]);
  return out;
}

}  // namespace

Matrix encode_a(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_a,
                const std::vector<Matrix>& noise_a, u64 x) {
  return encode_side(f, layout.alpha, blocks_a, layout.theta, noise_a, x, "A");
}

Matrix encode_b(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_b,
                const std::vector<Matrix>& noise_b, u64 x) {
  return encode_side(f, layout.beta, blocks_b, layout.eta, noise_b, x, "B");
}

Shares encode_share(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_a,
                    const BlockGrid& blocks_b, const std::vector<Matrix>& noise_a,
                    const std::vector<Matrix>& noise_b, u64 x) {
  return {encode_a(f, layout, blocks_a, noise_a, x), encode_b(f, layout, blocks_b, noise_b, x)};
}

Thresholds theoretical_thresholds(const SchemeParams& p) {
  check_common(p);
  const std::size_t k1 = p.K1, k2 = p.K2, m = p.m, x = p.X;
  switch (p.kind) {
    case SchemeKind::POLY: return {k1 * k2, k1 * k2};
    case SchemeKind::MATDOT: return {2 * m - 1, 2 * m - 1};
    case SchemeKind::EP: return {k1 * k2 * m, k1 * k2 * m + m - 1};
    case SchemeKind::SEP: {
      const std::size_t hat = resolve_orientation(p) == Orientation::first ? hat_first(p) : hat_second(p);
      return {hat - m + 1, hat};
    }
    case SchemeKind::PS: {
      const std::size_t hat = 2 * k1 * k2 * m + 2 * x - 1;
      return {hat - m + 1, hat};
    }
    case SchemeKind::TSEP: {
      if (resolve_orientation(p) == Orientation::first) return {hat_first(p) - k1 * (m - 1), hat_first(p)};
      return {hat_second(p) - k2 * (m - 1), hat_second(p)};
    }
    case SchemeKind::DFT: return {m, m};
    case SchemeKind::LRC: {
      if (p.r == 0 || p.m % lrc_h(p) != 0) bad("invalid LRC locality");
      const std::size_t groups = lrc_l(p);
      return {groups * p.r, lrc_g(p) * groups - p.delta + 1};
    }
    case SchemeKind::LRC_SECURE: {
      if (p.r == 0 || p.m % lrc_h(p) != 0) bad("invalid LRC locality");
      // 4m + 2 delta + 2X - 5 + (4m/(r+1) - 2)(delta - 2), kept in signed form.
      const i64 t = 4 * as_i64(m) + 2 * as_i64(p.delta) + 2 * as_i64(x) - 5 +
                    (4 * as_i64(m) / as_i64(p.r + 1) - 2) * (as_i64(p.delta) - 2);
      return {static_cast<std::size_t>(t), static_cast<std::size_t>(t)};
    }
  }
  bad("unknown kind");
}

std::size_t default_worker_count(const SchemeParams& p) {
  switch (p.kind) {
    case SchemeKind::DFT: return p.m;
    case SchemeKind::LRC: return lrc_g(p) * lrc_l(p);
    case SchemeKind::LRC_SECURE: {
      const std::size_t g = lrc_g(p);
      const std::size_t need = theoretical_thresholds(p).worst + 1;
      return (need + g - 1) / g * g;
    }
    default: return theoretical_thresholds(p).worst + 1;
  }
}

std::size_t worker_count(const SchemeParams& p) { return p.N != 0 ? p.N : default_worker_count(p); }

}  // namespace cdmm
