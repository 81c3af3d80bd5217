#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdmm/decoding.hpp"

namespace cdmm {

/// Lower bound for automatically chosen moduli.
inline constexpr u64 kDefaultMinModulus = u64{1} << 30;

/// Multiplicative order the evaluation points must support (1 if none).
std::size_t required_root_order(const SchemeParams& params, std::size_t n_workers);
/// Field for a scheme: params.modulus when set, otherwise the smallest prime
/// >= min_modulus supporting required_root_order.
PrimeField select_field(const SchemeParams& params, std::size_t n_workers,
                        u64 min_modulus = kDefaultMinModulus);

struct PointPlan {
  std::vector<u64> points;     // worker w evaluates at points[w]
  std::size_t root_count = 0;  // points[0..root_count) are zeta^w
  u64 root_order = 0;          // order of zeta, 0 when no roots are used
};

/// Roots of unity for the structured kinds followed by the smallest nonzero
/// elements not already used; 1..N for kinds decoded only by interpolation.
PointPlan plan_points(const PrimeField& f, const SchemeParams& params, std::size_t n_workers);

/// Groups of workers the decoders treat symmetrically. Workers in one cell
/// are interchangeable; cells of one class are interchangeable.
struct Cell {
  std::vector<std::size_t> workers;
  int cls = 0;
};
std::vector<Cell> symmetry_cells(const SchemeParams& params, const PointPlan& plan);

struct SimConfig {
  std::size_t N = 0;  // 0 uses worker_count(params)
  std::set<std::size_t> stragglers;
  std::set<std::size_t> byzantine;
  std::vector<std::size_t> arrival_order;  // empty: identity, or seeded shuffle
  bool shuffle_arrivals = false;
  std::vector<u64> explicit_points;  // replaces the planned points when non-empty
  bool verify = false;               // Freivalds check on every response
  u64 seed = 0;
};

struct SimReport {
  ErrorCode status = ErrorCode::undecodable;
  Matrix decoded;
  BlockGrid blocks;
  std::size_t responses_used = 0;
  std::size_t arrivals_processed = 0;
  DecodePath path = DecodePath::full;
  std::vector<std::size_t> byzantine_flagged;
  double wall_clock_seconds = 0;
  u64 modulus = 0;
  std::size_t n_workers = 0;

  bool success() const { return status == ErrorCode::ok; }
};

/// Encodes, runs every worker, feeds arrivals to the master and decodes as
/// soon as some path succeeds. A and B must already be reduced mod p of the
/// chosen field; use select_field to obtain it beforehand.
SimReport run_job(const SchemeParams& params, const Matrix& a, const Matrix& b, const SimConfig& sim);

/// SimReport as CSV rows (key,value); wall clock only when requested.
std::string sim_report_csv(const SchemeParams& params, const SimReport& report, bool include_timing);

/// One seeded Freivalds check of product == a_share * b_share.
bool freivalds_check(const PrimeField& f, const Matrix& a_share, const Matrix& b_share,
                     const Matrix& product, Rng& rng);

enum class MeasureMode { automatic, exhaustive, orbit, sampling };
const char* to_string(MeasureMode mode);
MeasureMode parse_measure_mode(const std::string& name);

struct ThresholdMeasurement {
  std::size_t best = 0;
  std::size_t worst = 0;
  MeasureMode mode = MeasureMode::exhaustive;
  bool exact = true;       // false for sampling bounds
  bool confirmed = false;  // witnesses reproduced on a second instance
  std::size_t subsets_checked = 0;
  std::size_t n_workers = 0;
  std::vector<std::size_t> best_witness;
  std::vector<std::size_t> worst_failure;  // a failing subset of size worst - 1
};

inline constexpr std::size_t kExhaustiveLimit = 16;

ThresholdMeasurement measure_thresholds(const SchemeParams& params,
                                        MeasureMode mode = MeasureMode::automatic, u64 seed = 1,
                                        std::size_t sampling_trials = 200);

struct ComparisonRow {
  SchemeParams params;
  Thresholds theoretical;
  ThresholdMeasurement measured;
  bool matches() const {
    return measured.exact && measured.confirmed && measured.best == theoretical.best &&
           measured.worst == theoretical.worst;
  }
};

/// Expands a grid config (preset or explicit lists) into parameter sets.
std::vector<SchemeParams> expand_grid(const Config& grid);
std::vector<ComparisonRow> emit_comparison_table(const std::vector<SchemeParams>& grid,
                                                 MeasureMode mode = MeasureMode::automatic, u64 seed = 1);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_text(const std::vector<ComparisonRow>& rows);

}  // namespace cdmm
