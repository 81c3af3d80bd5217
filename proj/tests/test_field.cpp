#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "cdmm/field.hpp"
#include "cdmm/poly.hpp"

using namespace cdmm;

namespace {

bool trial_division_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 brute_order(u64 a, u64 p) {
  u64 x = a % p, k = 1;
  while (x != 1) {
    x = static_cast<u64>(static_cast<u128>(x) * a % p);
    ++k;
  }
  return k;
}

u64 scan_field(u64 lcm, u64 min_modulus) {
  for (u64 p = min_modulus;; ++p)
    if (trial_division_prime(p) && (p - 1) % lcm == 0) return p;
}

}  // namespace

TEST(Primality, MatchesSieveBelow200000) {
  const std::size_t n = 200000;
  std::vector<bool> sieve(n, true);
  sieve[0] = sieve[1] = false;
  for (std::size_t i = 2; i * i < n; ++i)
    if (sieve[i])
      for (std::size_t j = i * i; j < n; j += i) sieve[j] = false;
  for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(is_prime(i), sieve[i]) << i;
}

TEST(Primality, MatchesTrialDivisionOnRandom40BitOdds) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const u64 n = (rng() >> 24) | 1;
    ASSERT_EQ(is_prime(n), trial_division_prime(n)) << n;
  }
}

TEST(Primality, KnownHardCases) {
  EXPECT_TRUE(is_prime((u64{1} << 61) - 1));
  EXPECT_TRUE(is_prime((u64{1} << 62) - 57));
  EXPECT_FALSE(is_prime(561));             // Carmichael
  EXPECT_FALSE(is_prime(3215031751ULL));   // strong pseudoprime to bases 2, 3, 5, 7
  EXPECT_FALSE(is_prime(3825123056546413051ULL));  // strong pseudoprime to the first nine prime bases
}

TEST(PrimeField, RejectsCompositeAndOversizedModuli) {
  EXPECT_THROW(PrimeField(15), Error);
  EXPECT_THROW(PrimeField((u64{1} << 62) + 135), Error);
}

TEST(PrimeField, PrimitiveRootIsSmallestGenerator) {
  for (u64 p : {3ULL, 5ULL, 7ULL, 17ULL, 97ULL, 257ULL, 7919ULL}) {
    const PrimeField f(p);
    u64 g = 2;
    while (brute_order(g, p) != p - 1) ++g;
    EXPECT_EQ(f.primitive_root(), g) << p;
  }
}

TEST(PrimeField, ArithmeticStaysReducedAndInvertsNonzero) {
  const PrimeField f((u64{1} << 61) - 1);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const u64 a = rng() % f.modulus(), b = rng() % f.modulus();
    EXPECT_LT(f.add(a, b), f.modulus());
    EXPECT_LT(f.mul(a, b), f.modulus());
    EXPECT_EQ(f.add(f.sub(a, b), b), a);
    if (a != 0) EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
  }
  EXPECT_THROW(f.inv(0), Error);
  EXPECT_EQ(f.to_signed(f.from_int(-5)), -5);
}

TEST(FieldElement, MixingModuliFails) {
  const PrimeField a(17), b(19);
  try {
    (void)(make_element(a, 3) + make_element(b, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::field_mismatch);
  }
  EXPECT_EQ((make_element(a, 5) * inverse(make_element(a, 5))).value, 1u);
  EXPECT_EQ(power(make_element(a, 3), 16).value, 1u);
}

TEST(FindField, FrozenScanValues) {
  EXPECT_EQ(find_field_for_orders({16}, 100).modulus(), 113u);
  EXPECT_EQ(find_field_for_orders({2}, 3).modulus(), 3u);
  EXPECT_EQ(find_field_for_orders({15}, 16).modulus(), 31u);
}

TEST(FindField, AgreesWithTrialDivisionScan) {
  for (u64 order : {1ULL, 2ULL, 3ULL, 10ULL, 15ULL, 16ULL, 17ULL, 40ULL})
    for (u64 lo : {3ULL, 50ULL, 1000ULL, 100003ULL})
      EXPECT_EQ(find_field_for_orders({order}, lo).modulus(), scan_field(order, lo)) << order << " " << lo;
  EXPECT_EQ(find_field_for_orders({4, 6}, 10).modulus(), scan_field(12, 10));
}

TEST(FindField, SearchBoundExceeded) {
  try {
    find_field_for_orders({1000}, 100, 200);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::search_bound_exceeded);
  }
}

TEST(RootOfUnity, OrderIsExactForSmallPrimes) {
  for (u64 p = 3; p < 2000; ++p) {
    if (!trial_division_prime(p)) continue;
    const PrimeField f(p);
    for (u64 n = 1; n < p; ++n) {
      if ((p - 1) % n) continue;
      const u64 z = root_of_unity(f, n);
      ASSERT_EQ(brute_order(z, p), n) << p << " " << n;
    }
  }
  EXPECT_EQ(root_of_unity(PrimeField(17), 2), 16u);
}

TEST(RootOfUnity, UnsupportedOrder) {
  try {
    root_of_unity(PrimeField(17), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::order_not_supported);
  }
  const PrimeField f(257);
  const u64 z = root_of_unity(f, 16);
  EXPECT_EQ(f.pow(z, 16), 1u);
  EXPECT_NE(f.pow(z, 8), 1u);
}

TEST(Dft, SmallHandValues) {
  const PrimeField f(17);
  EXPECT_EQ(dft(f, {1, 0}, 16), (std::vector<u64>{1, 1}));
  EXPECT_EQ(dft(f, {0, 1}, 16), (std::vector<u64>{1, 16}));
  EXPECT_EQ(idft(f, {1, 1}, 16), (std::vector<u64>{1, 0}));
  EXPECT_EQ(idft(f, {2, 0}, 16), (std::vector<u64>{1, 1}));
}

TEST(Dft, LengthNotInvertible) {
  const PrimeField f(2);
  try {
    idft(f, {1, 1}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_invertible);
  }
}

TEST(Dft, WrongOrderRejected) {
  const PrimeField f(17);
  try {
    dft(f, {1, 2, 3, 4}, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::order_mismatch);
  }
}

TEST(Dft, RoundTripAcrossLengths) {
  std::mt19937_64 rng(11);
  for (u64 k : {2ULL, 3ULL, 4ULL, 5ULL, 8ULL, 15ULL, 16ULL, 17ULL}) {
    const PrimeField f = find_field_for_orders({k}, 1000);
    const u64 z = root_of_unity(f, k);
    for (int t = 0; t < 50; ++t) {
      std::vector<u64> c(k);
      for (auto& v : c) v = rng() % f.modulus();
      ASSERT_EQ(idft(f, dft(f, c, z), z), c) << k;
      ASSERT_EQ(coset_idft(f, dft(f, c, z), z, 1), idft(f, dft(f, c, z), z));
    }
  }
}

TEST(Dft, FastPathMatchesNaiveEvaluation) {
  std::mt19937_64 rng(5);
  const PrimeField f = find_field_for_orders({64}, u64{1} << 40);
  for (int t = 0; t < 1000; ++t) {
    const u64 k = u64{1} << (1 + t % 6);
    const u64 z = root_of_unity(f, k);
    std::vector<u64> c(k);
    for (auto& v : c) v = rng() % f.modulus();
    // Oracle: direct Vandermonde product.
    std::vector<u64> expect(k, 0);
    for (u64 i = 0; i < k; ++i)
      for (u64 j = 0; j < k; ++j) expect[i] = f.add(expect[i], f.mul(c[j], f.pow(z, i * j)));
    ASSERT_EQ(dft(f, c, z), expect);
    ASSERT_EQ(naive_dft(f, c, z), expect);
  }
}

TEST(CosetIdft, LinearPolynomialOnShiftedPoints) {
  const PrimeField f(17);
  const u64 a = 5, b = 9, r = 2;
  // Values of a + b x at r and -r.
  const std::vector<u64> values{f.add(a, f.mul(b, r)), f.sub(a, f.mul(b, r))};
  EXPECT_EQ(coset_idft(f, values, 16, r), (std::vector<u64>{a, b}));
  try {
    coset_idft(f, values, 16, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::zero_scale);
  }
}

TEST(Interpolation, EntrywiseQuadraticPredictsFourthPoint) {
  const PrimeField f(17);
  // Entry (i, j) follows q(x) = (i + 1) + (j + 2) x + 3 x^2.
  auto q = [&](std::size_t i, std::size_t j, u64 x) {
    return f.add(f.add(i + 1, f.mul(j + 2, x)), f.mul(3, f.mul(x, x)));
  };
  std::vector<Matrix> values;
  for (u64 x : {1, 2, 3}) {
    Matrix m(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = q(i, j, x);
    values.push_back(m);
  }
  const MatrixPoly poly = vandermonde_interpolate(f, {1, 2, 3}, values);
  const Matrix at5 = poly_eval(f, poly, 5);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(at5(i, j), q(i, j, 5));
  EXPECT_EQ(poly.degree(), 2);
}

TEST(Interpolation, SinglePointIsConstantAndDuplicatesFail) {
  const PrimeField f(17);
  Matrix v(1, 2);
  v(0, 0) = 4;
  v(0, 1) = 7;
  const MatrixPoly p = vandermonde_interpolate(f, {9}, {v});
  EXPECT_EQ(poly_eval(f, p, 3), v);
  try {
    vandermonde_interpolate(f, {2, 2}, {v, v});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::duplicate_points);
  }
}

TEST(Interpolation, ReproducesInputsAtEveryPoint) {
  std::mt19937_64 rng(9);
  const PrimeField f((u64{1} << 61) - 1);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + t % 12;
    std::vector<u64> pts;
    std::vector<Matrix> vals;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(1000 + 37 * i + t);
      vals.push_back(random_matrix(f, 2, 3, rng));
    }
    const MatrixPoly p = vandermonde_interpolate(f, pts, vals);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(poly_eval(f, p, pts[i]), vals[i]);
  }
}

TEST(PolyEval, ZeroConstantAndSumAtOne) {
  const PrimeField f(17);
  MatrixPoly zero{2, 2, {}};
  EXPECT_TRUE(is_zero(poly_eval(f, zero, 5)));
  Matrix c(2, 2, 3);
  EXPECT_EQ(poly_eval(f, MatrixPoly{2, 2, {c}}, 11), c);
  Matrix d(2, 2, 5), e(2, 2, 15);
  EXPECT_EQ(poly_eval(f, MatrixPoly{2, 2, {c, d, e}}, 1), Matrix(2, 2, 6));
}
