#include "cdmm/field.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cdmm {
namespace {

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 a, u64 e, u64 n) {
  u64 result = 1 % n;
  a %= n;
  while (e != 0) {
    if (e & 1) result = mulmod(result, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return result;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// Brent's variant of Pollard rho; n must be odd and composite.
u64 pollard_rho(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    std::size_t r = 1;
    constexpr std::size_t kBatch = 64;
    auto step = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (std::size_t i = 0; i < r; ++i) y = step(y);
      std::size_t k = 0;
      do {
        ys = y;
        for (std::size_t i = 0; i < std::min(kBatch, r - k); ++i) {
          y = step(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += kBatch;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    if (n % q == 0) {
      out.push_back(q);
      factor_into(n / q, out);
      return;
    }
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

bool is_power_of_two(std::size_t k) { return k != 0 && (k & (k - 1)) == 0; }

void check_order(const PrimeField& f, u64 zeta, std::size_t k) {
  if (k == 0 || f.pow(zeta, k) != 1) fail(ErrorCode::order_mismatch, "root does not have the transform length as order");
  for (u64 q : prime_factors(k)) {
    if (f.pow(zeta, k / q) == 1) fail(ErrorCode::order_mismatch, "root order is a proper divisor of the transform length");
  }
}

void ntt_in_place(const PrimeField& f, std::vector<u64>& a, u64 zeta) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const u64 w_len = f.pow(zeta, n / len);
    for (std::size_t i = 0; i < n; i += len) {
      u64 w = 1;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const u64 u = a[i + j];
        const u64 v = f.mul(a[i + j + len / 2], w);
        a[i + j] = f.add(u, v);
        a[i + j + len / 2] = f.sub(u, v);
        w = f.mul(w, w_len);
      }
    }
  }
}

void check_same(const FieldElement& a, const FieldElement& b) {
  if (a.modulus != b.modulus || a.modulus == 0) fail(ErrorCode::field_mismatch, "elements belong to different fields");
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all n < 3.3e24.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  if (n > 1) factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PrimeField::PrimeField(u64 modulus) : p_(modulus) {
  if (modulus >= kMaxModulus) fail(ErrorCode::invalid_argument, "modulus must be below 2^62");
  if (!is_prime(modulus)) fail(ErrorCode::invalid_argument, "modulus " + std::to_string(modulus) + " is not prime");
  factors_ = prime_factors(modulus - 1);
  if (modulus == 2) {
    g_ = 1;
    return;
  }
  for (u64 g = 2; g < modulus; ++g) {
    bool generator = true;
    for (u64 q : factors_) {
      if (pow(g, (modulus - 1) / q) == 1) {
        generator = false;
        break;
      }
    }
    if (generator) {
      g_ = g;
      return;
    }
  }
}

u64 PrimeField::pow(u64 a, u64 e) const noexcept { return powmod(a, e, p_); }

u64 PrimeField::inv(u64 a) const {
  if (a % p_ == 0) fail(ErrorCode::not_invertible, "zero has no inverse");
  return pow(a, p_ - 2);
}

u64 PrimeField::from_int(std::int64_t v) const noexcept {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return static_cast<u64>(r);
}

u64 PrimeField::pow_signed(u64 a, std::int64_t e) const {
  if (e >= 0) return pow(a, static_cast<u64>(e));
  return pow(inv(a), static_cast<u64>(-e));
}

u64 PrimeField::element_order(u64 a) const {
  if (a % p_ == 0) fail(ErrorCode::invalid_argument, "zero has no multiplicative order");
  u64 order = p_ - 1;
  for (u64 q : factors_) {
    while (order % q == 0 && pow(a, order / q) == 1) order /= q;
  }
  return order;
}

FieldElement make_element(const PrimeField& f, std::int64_t v) {
  return {f.from_int(v), f.modulus()};
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  check_same(a, b);
  u64 s = a.value + b.value;
  return {s >= a.modulus ? s - a.modulus : s, a.modulus};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  check_same(a, b);
  return {a.value >= b.value ? a.value - b.value : a.value + a.modulus - b.value, a.modulus};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  check_same(a, b);
  return {mulmod(a.value, b.value, a.modulus), a.modulus};
}

FieldElement inverse(const FieldElement& a) {
  if (a.modulus == 0) fail(ErrorCode::field_mismatch, "element has no field");
  if (a.value == 0) fail(ErrorCode::not_invertible, "zero has no inverse");
  return {powmod(a.value, a.modulus - 2, a.modulus), a.modulus};
}

FieldElement power(const FieldElement& a, u64 e) {
  if (a.modulus == 0) fail(ErrorCode::field_mismatch, "element has no field");
  return {powmod(a.value, e, a.modulus), a.modulus};
}

PrimeField find_field_for_orders(const std::set<u64>& orders, u64 min_modulus, u64 ceiling) {
  if (min_modulus < 3) fail(ErrorCode::invalid_argument, "min_modulus must be at least 3");
  u64 l = 1;
  for (u64 o : orders) {
    if (o == 0) fail(ErrorCode::invalid_argument, "orders must be positive");
    l = std::lcm(l, o);
    if (l >= ceiling) fail(ErrorCode::search_bound_exceeded, "lcm of orders exceeds the search ceiling");
  }
  ceiling = std::min(ceiling, kMaxModulus);
  // First candidate t*l + 1 >= min_modulus.
  u64 t = (min_modulus - 1 + l - 1) / l;
  for (u64 p = t * l + 1; p < ceiling; p += l) {
    if (is_prime(p)) return PrimeField(p);
    if (p > ceiling - l) break;
  }
  fail(ErrorCode::search_bound_exceeded, "no suitable prime below the search ceiling");
}

u64 root_of_unity(const PrimeField& f, u64 n) {
  if (n == 0 || (f.modulus() - 1) % n != 0) {
    fail(ErrorCode::order_not_supported, "order " + std::to_string(n) + " does not divide p-1");
  }
  return f.pow(f.primitive_root(), (f.modulus() - 1) / n);
}

std::vector<u64> naive_dft(const PrimeField& f, const std::vector<u64>& coeffs, u64 zeta) {
  const std::size_t k = coeffs.size();
  std::vector<u64> out(k, 0);
  u64 zi = 1;  // zeta^i
  for (std::size_t i = 0; i < k; ++i) {
    u64 acc = 0;
    for (std::size_t j = k; j-- > 0;) acc = f.add(f.mul(acc, zi), coeffs[j]);
    out[i] = acc;
    zi = f.mul(zi, zeta);
  }
  return out;
}

std::vector<u64> dft(const PrimeField& f, const std::vector<u64>& coeffs, u64 zeta) {
  check_order(f, zeta, coeffs.size());
  if (is_power_of_two(coeffs.size())) {
    std::vector<u64> a = coeffs;
    ntt_in_place(f, a, zeta);
    return a;
  }
  return naive_dft(f, coeffs, zeta);
}

std::vector<u64> idft(const PrimeField& f, const std::vector<u64>& values, u64 zeta) {
  const u64 k = values.size();
  if (k == 0 || k % f.modulus() == 0) fail(ErrorCode::not_invertible, "transform length is zero in the field");
  check_order(f, zeta, values.size());
  std::vector<u64> out = dft(f, values, f.inv(zeta));
  const u64 k_inv = f.inv(k % f.modulus());
  for (u64& v : out) v = f.mul(v, k_inv);
  return out;
}

std::vector<u64> coset_idft(const PrimeField& f, const std::vector<u64>& values, u64 zeta,
                            u64 r) {
  if (r % f.modulus() == 0) fail(ErrorCode::zero_scale, "coset shift must be nonzero");
  std::vector<u64> out = idft(f, values, zeta);
  const u64 r_inv = f.inv(r);
  u64 s = 1;
  for (u64& v : out) {
    v = f.mul(v, s);
    s = f.mul(s, r_inv);
  }
  return out;
}

}  // namespace cdmm
