#pragma once

#include <string>
#include <vector>

#include "cdmm/schemes.hpp"

namespace cdmm {

struct NoiseInvertibility {
  bool a = false;
  bool b = false;
  bool both() const { return a && b; }
};

/// Whether the X x X matrices (x_s^theta_t) and (x_s^eta_t) over the colluding
/// subset are invertible. Subset holds indices into `points`.
NoiseInvertibility noise_map_check(const PrimeField& f, const ExponentLayout& layout,
                                   const std::vector<u64>& points,
                                   const std::vector<std::size_t>& subset);
bool noise_map_invertible(const PrimeField& f, const ExponentLayout& layout,
                          const std::vector<u64>& points, const std::vector<std::size_t>& subset);

struct AuditRow {
  std::vector<std::size_t> subset;
  bool invertible_a = false;
  bool invertible_b = false;
  bool distribution_equal = false;
  bool passed() const { return invertible_a && invertible_b && distribution_equal; }
};

struct AuditReport {
  u64 modulus = 0;
  std::size_t colluders = 0;
  std::vector<u64> points;
  std::vector<AuditRow> rows;
  bool passed() const;
};

/// Exact enumeration over every noise value with 1 x 1 blocks. X = 0 schemes
/// are audited against a single colluder. Requires p <= 31 and X <= 2.
AuditReport exhaustive_security_audit(const SchemeParams& params, std::size_t n_workers, u64 modulus,
                                      u64 seed = 1);

/// CSV columns: subset,invertible_a,invertible_b,distribution_equal
std::string audit_csv(const AuditReport& report);

/// All index subsets of size k from [0, n), lexicographic.
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k);

}  // namespace cdmm
