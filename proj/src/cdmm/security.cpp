#include "cdmm/security.hpp"

#include <sstream>

namespace cdmm {
namespace {

bool square_invertible(const PrimeField& f, const std::vector<u64>& points,
                       const std::vector<std::size_t>& subset, const std::vector<std::int64_t>& exps) {
  const std::size_t x = subset.size();
  if (exps.size() != x || x == 0) return false;
  Matrix v(x, x);
  for (std::size_t s = 0; s < x; ++s) {
    const u64 pt = points.at(subset[s]);
    for (std::size_t t = 0; t < x; ++t) {
      if (pt == 0 && exps[t] < 0) return false;
      v(s, t) = f.pow_signed(pt, exps[t]);
    }
  }
  return rank(f, v) == x;
}

// Counts of each joint share tuple over all noise assignments.
std::vector<std::uint32_t> share_histogram(const PrimeField& f, const ExponentLayout& layout,
                                           const std::vector<u64>& points,
                                           const std::vector<std::size_t>& subset,
                                           const Matrix& a, const Matrix& b) {
  const u64 p = f.modulus();
  const std::size_t c = subset.size();
  const std::size_t x = layout.X();
  std::vector<u64> base_a(c, 0), base_b(c, 0);
  std::vector<std::vector<u64>> coef_a(c, std::vector<u64>(x)), coef_b(c, std::vector<u64>(x));
  for (std::size_t s = 0; s < c; ++s) {
    const u64 pt = points[subset[s]];
    for (std::size_t j = 0; j < a.rows(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k)
        base_a[s] = f.add(base_a[s], f.mul(a(j, k), f.pow_signed(pt, layout.alpha(j, k))));
    for (std::size_t j = 0; j < b.rows(); ++j)
      for (std::size_t k = 0; k < b.cols(); ++k)
        base_b[s] = f.add(base_b[s], f.mul(b(j, k), f.pow_signed(pt, layout.beta(j, k))));
    for (std::size_t t = 0; t < x; ++t) {
      coef_a[s][t] = f.pow_signed(pt, layout.theta[t]);
      coef_b[s][t] = f.pow_signed(pt, layout.eta[t]);
    }
  }
  std::size_t noise_space = 1;
  for (std::size_t t = 0; t < x; ++t) noise_space *= p;
  std::size_t bucket_count = 1;
  for (std::size_t s = 0; s < 2 * c; ++s) bucket_count *= p;

  // Share index of one side for a given noise assignment (digits of `code`).
  auto side_index = [&](std::size_t code, const std::vector<u64>& base,
                        const std::vector<std::vector<u64>>& coef) {
    std::vector<u64> noise(x);
    for (std::size_t t = 0; t < x; ++t) {
      noise[t] = code % p;
      code /= p;
    }
    std::size_t idx = 0;
    for (std::size_t s = c; s-- > 0;) {
      u64 share = base[s];
      for (std::size_t t = 0; t < x; ++t) share = f.add(share, f.mul(coef[s][t], noise[t]));
      idx = idx * p + share;
    }
    return idx;
  };
  std::vector<std::size_t> idx_a(noise_space), idx_b(noise_space);
  for (std::size_t code = 0; code < noise_space; ++code) {
    idx_a[code] = side_index(code, base_a, coef_a);
    idx_b[code] = side_index(code, base_b, coef_b);
  }
  std::size_t side_buckets = 1;
  for (std::size_t s = 0; s < c; ++s) side_buckets *= p;
  std::vector<std::uint32_t> hist(bucket_count, 0);
  for (std::size_t ra = 0; ra < noise_space; ++ra)
    for (std::size_t tb = 0; tb < noise_space; ++tb) ++hist[idx_a[ra] + side_buckets * idx_b[tb]];
  return hist;
}

}  // namespace

NoiseInvertibility noise_map_check(const PrimeField& f, const ExponentLayout& layout,
                                   const std::vector<u64>& points,
                                   const std::vector<std::size_t>& subset) {
  if (subset.size() != layout.X() || subset.empty()) {
    fail(ErrorCode::subset_size_mismatch, "colluding subset size must equal X >= 1");
  }
  return {square_invertible(f, points, subset, layout.theta), square_invertible(f, points, subset, layout.eta)};
}

bool noise_map_invertible(const PrimeField& f, const ExponentLayout& layout,
                          const std::vector<u64>& points, const std::vector<std::size_t>& subset) {
  return noise_map_check(f, layout, points, subset).both();
}

bool AuditReport::passed() const {
  if (rows.empty()) return false;
  for (const auto& r : rows)
    if (!r.passed()) return false;
  return true;
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

AuditReport exhaustive_security_audit(const SchemeParams& params, std::size_t n_workers, u64 modulus,
                                      u64 seed) {
  if (modulus > 31) fail(ErrorCode::too_large, "exhaustive audit needs p <= 31");
  if (params.X > 2) fail(ErrorCode::too_large, "exhaustive audit needs X <= 2");
  const PrimeField f(modulus);
  if (n_workers == 0 || n_workers >= modulus) fail(ErrorCode::too_large, "need N distinct nonzero points below p");
  SchemeParams p = params;
  p.N = 0;
  const ExponentLayout layout = make_layout(p);

  AuditReport report;
  report.modulus = modulus;
  report.colluders = params.X == 0 ? 1 : params.X;
  for (std::size_t i = 0; i < n_workers; ++i) report.points.push_back(i + 1);

  // Fixed (A, B) pairs: all zero, all one, and two seeded random ones.
  std::vector<std::pair<Matrix, Matrix>> pairs;
  pairs.emplace_back(Matrix(p.K1, p.m, 0), Matrix(p.m, p.K2, 0));
  pairs.emplace_back(Matrix(p.K1, p.m, 1), Matrix(p.m, p.K2, 1));
  Rng rng(seed);
  for (int i = 0; i < 2; ++i) {
    Matrix a = random_matrix(f, p.K1, p.m, rng);
    Matrix b = random_matrix(f, p.m, p.K2, rng);
    pairs.emplace_back(std::move(a), std::move(b));
  }

  for (const auto& subset : index_subsets(n_workers, report.colluders)) {
    AuditRow row;
    row.subset = subset;
    if (layout.X() == report.colluders) {
      const NoiseInvertibility inv = noise_map_check(f, layout, report.points, subset);
      row.invertible_a = inv.a;
      row.invertible_b = inv.b;
    }
    const auto reference = share_histogram(f, layout, report.points, subset, pairs[0].first, pairs[0].second);
    row.distribution_equal = true;
    for (std::size_t i = 1; i < pairs.size() && row.distribution_equal; ++i) {
      row.distribution_equal =
          share_histogram(f, layout, report.points, subset, pairs[i].first, pairs[i].second) == reference;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string audit_csv(const AuditReport& report) {
  std::ostringstream out;
  out << "subset,invertible_a,invertible_b,distribution_equal\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.subset.size(); ++i) out << (i ? ";" : "") << row.subset[i];
    out << ',' << (row.invertible_a ? "true" : "false") << ',' << (row.invertible_b ? "true" : "false") << ','
        << (row.distribution_equal ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace cdmm
