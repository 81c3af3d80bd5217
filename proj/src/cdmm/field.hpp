#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <set>
#include <vector>

#include "cdmm/error.hpp"

namespace cdmm {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Largest supported modulus (exclusive); products fit in 128 bits.
inline constexpr u64 kMaxModulus = u64{1} << 62;

bool is_prime(u64 n);

/// Prime factors of n (distinct, ascending).
std::vector<u64> prime_factors(u64 n);

/// Prime field F_p with a fixed primitive root. Value type; cheap to copy.
class PrimeField {
 public:
  PrimeField() = default;
  explicit PrimeField(u64 modulus);

  u64 modulus() const noexcept { return p_; }
  u64 primitive_root() const noexcept { return g_; }
  const std::vector<u64>& group_order_factors() const noexcept { return factors_; }

  u64 add(u64 a, u64 b) const noexcept {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const noexcept { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const noexcept {
    return static_cast<u64>(static_cast<u128>(a) * b % p_);
  }
  u64 pow(u64 a, u64 e) const noexcept;
  /// Throws not_invertible on zero.
  u64 inv(u64 a) const;
  /// Maps any signed integer into [0, p).
  u64 from_int(std::int64_t v) const noexcept;
  /// a^e for signed e; a must be nonzero when e < 0.
  u64 pow_signed(u64 a, std::int64_t e) const;
  /// Centered lift to (-p/2, p/2].
  std::int64_t to_signed(u64 a) const noexcept {
    return a > p_ / 2 ? -static_cast<std::int64_t>(p_ - a) : static_cast<std::int64_t>(a);
  }

  /// Multiplicative order of a nonzero element.
  u64 element_order(u64 a) const;

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept {
    return a.p_ == b.p_;
  }

 private:
  u64 p_ = 0;
  u64 g_ = 0;
  std::vector<u64> factors_;  // prime factors of p - 1
};

/// An element bound to its modulus. Mixing moduli throws field_mismatch.
struct FieldElement {
  u64 value = 0;
  u64 modulus = 0;

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

FieldElement make_element(const PrimeField& f, std::int64_t v);
FieldElement operator+(const FieldElement& a, const FieldElement& b);
FieldElement operator-(const FieldElement& a, const FieldElement& b);
FieldElement operator*(const FieldElement& a, const FieldElement& b);
FieldElement inverse(const FieldElement& a);
FieldElement power(const FieldElement& a, u64 e);

/// Smallest prime p >= min_modulus with lcm(orders) | p - 1, searched below
/// `ceiling`.
PrimeField find_field_for_orders(const std::set<u64>& orders, u64 min_modulus,
                                 u64 ceiling = kMaxModulus);

/// Element of order exactly n: g^((p-1)/n).
u64 root_of_unity(const PrimeField& f, u64 n);

/// Forward transform: out[i] = sum_j c[j] zeta^(i j).
std::vector<u64> dft(const PrimeField& f, const std::vector<u64>& coeffs, u64 zeta);
/// Inverse of dft through (1/K) V(zeta^-1).
std::vector<u64> idft(const PrimeField& f, const std::vector<u64>& values, u64 zeta);
/// Coefficients of a degree < K polynomial from its values at r zeta^i.
std::vector<u64> coset_idft(const PrimeField& f, const std::vector<u64>& values, u64 zeta,
                            u64 r);

/// Reference O(K^2) evaluation; used by tests and the non power-of-two path.
std::vector<u64> naive_dft(const PrimeField& f, const std::vector<u64>& coeffs, u64 zeta);

}  // namespace cdmm
