#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdmm/config.hpp"
#include "cdmm/matrix.hpp"

namespace cdmm {

enum class SchemeKind { POLY, MATDOT, EP, SEP, PS, TSEP, DFT, LRC, LRC_SECURE };

/// Which of the two mirrored layouts SEP/TSEP use. `automatic` picks the one
/// with the smaller worst threshold (ties go to `first`).
enum class Orientation { automatic, first, second };

const char* to_string(SchemeKind kind);
SchemeKind parse_kind(const std::string& name);
const char* to_string(Orientation o);
Orientation parse_orientation(const std::string& name);

struct SchemeParams {
  SchemeKind kind = SchemeKind::EP;
  std::size_t K1 = 1;
  std::size_t K2 = 1;
  std::size_t m = 1;
  std::size_t X = 0;
  std::size_t r = 0;
  std::size_t delta = 0;
  std::size_t N = 0;  // 0 selects the default worker count
  u64 seed = 0;
  u64 modulus = 0;  // 0 selects a field automatically
  Orientation orientation = Orientation::automatic;

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;
};

/// Throws bad_params when the parameter combination is unsupported.
void validate_params(const SchemeParams& p);

SchemeParams params_from_config(const Config& cfg);
std::string params_to_config(const SchemeParams& p);

struct ExponentLayout {
  SchemeParams params;
  Orientation orientation = Orientation::first;  // resolved, never automatic
  ExponentGrid alpha;                            // K1 x m
  ExponentGrid beta;                             // m x K2
  std::vector<std::int64_t> theta;               // noise exponents for A, size X
  std::vector<std::int64_t> eta;                 // noise exponents for B, size X
  ExponentGrid c_exponent;                       // K1 x K2
  std::int64_t product_degree = 0;
  std::int64_t min_degree = 0;  // negative only for Laurent layouts
  std::size_t modulo_order = 0;
  std::size_t group_size = 0;  // coset size for grouped extraction, 0 if unused

  std::size_t K1() const { return alpha.rows(); }
  std::size_t m() const { return alpha.cols(); }
  std::size_t K2() const { return beta.cols(); }
  std::size_t X() const { return theta.size(); }
};

struct LrcLayout {
  std::size_t g_degree = 0;     // r + delta - 1
  std::size_t group_count = 0;  // number of local groups
  std::size_t r = 0;
  std::size_t delta = 0;
  std::int64_t ab_coefficient_degree = 0;
  /// Evaluation indices per group; index w stands for zeta^w.
  std::vector<std::vector<std::size_t>> groups;
};

ExponentLayout layout_ep(const SchemeParams& p);
ExponentLayout layout_sep(const SchemeParams& p);
ExponentLayout layout_ps(const SchemeParams& p);
ExponentLayout layout_tsep(const SchemeParams& p);
std::pair<ExponentLayout, LrcLayout> layout_lrc(const SchemeParams& p);
ExponentLayout layout_dft(const SchemeParams& p);
/// First-orientation secure entangled layout for any X >= 0; `column_ordered`
/// selects the transposed-SEP placement of A. Used where X = 0 is allowed.
ExponentLayout entangled_layout(std::size_t K1, std::size_t K2, std::size_t m, std::size_t X,
                                bool column_ordered);
/// Dispatches on kind.
ExponentLayout make_layout(const SchemeParams& p);
std::optional<LrcLayout> make_lrc_layout(const SchemeParams& p);

/// True when every c_exponent degree holds exactly the m terms of its C block
/// and nothing else.
bool collision_free(const ExponentLayout& layout);
/// max(alpha, theta) + max(beta, eta) over all exponent sums.
std::int64_t max_exponent_sum(const ExponentLayout& layout);
/// True when grouping points by x^g yields a polynomial whose coefficients are
/// exactly the C blocks (degrees = g-1 mod g carry only useful terms).
bool grouped_extraction_valid(const ExponentLayout& layout, std::size_t g);
/// Number of complete groups of size g needed by grouped extraction.
std::size_t groups_needed(const ExponentLayout& layout, std::size_t g);

struct Shares {
  Matrix a;
  Matrix b;
};

Matrix encode_a(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_a,
                const std::vector<Matrix>& noise_a, u64 x);
Matrix encode_b(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_b,
                const std::vector<Matrix>& noise_b, u64 x);
Shares encode_share(const PrimeField& f, const ExponentLayout& layout, const BlockGrid& blocks_a,
                    const BlockGrid& blocks_b, const std::vector<Matrix>& noise_a,
                    const std::vector<Matrix>& noise_b, u64 x);

struct Thresholds {
  std::size_t best = 0;
  std::size_t worst = 0;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Closed-form (best, worst) recovery thresholds.
Thresholds theoretical_thresholds(const SchemeParams& p);

/// Worker count used when params.N is 0.
std::size_t default_worker_count(const SchemeParams& p);
std::size_t worker_count(const SchemeParams& p);

}  // namespace cdmm
