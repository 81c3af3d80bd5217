#include "cdmm/poly.hpp"

#include <algorithm>
#include <numeric>

namespace cdmm {

long MatrixPoly::degree() const {
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    if (!is_zero(coeffs[i])) return static_cast<long>(i);
  }
  return -1;
}

Grid<u64> interpolation_weights(const PrimeField& f, const std::vector<u64>& points,
                                const std::vector<std::size_t>& degrees) {
  const std::size_t n = points.size();
  {
    std::vector<u64> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(ErrorCode::duplicate_points, "interpolation points must be distinct");
    }
  }
  // master(x) = prod (x - x_i), ascending coefficients, degree n.
  std::vector<u64> master(n + 1, 0);
  master[0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = i + 2; d-- > 0;) {
      const u64 shifted = d > 0 ? master[d - 1] : 0;
      master[d] = f.sub(shifted, f.mul(points[i], master[d]));
    }
  }
  Grid<u64> w(degrees.size(), n, 0);
  std::vector<u64> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    // q = master / (x - x_i) by synthetic division from the top.
    u64 carry = 0;
    for (std::size_t d = n; d-- > 0;) {
      carry = f.add(master[d + 1], f.mul(carry, points[i]));
      q[d] = carry;
    }
    const u64 denom_inv = f.inv(eval_scalar(f, q, points[i]));
    for (std::size_t t = 0; t < degrees.size(); ++t) {
      if (degrees[t] < n) w(t, i) = f.mul(q[degrees[t]], denom_inv);
    }
  }
  return w;
}

MatrixPoly vandermonde_interpolate(const PrimeField& f, const std::vector<u64>& points,
                                   const std::vector<Matrix>& values) {
  if (points.size() != values.size()) fail(ErrorCode::invalid_argument, "points and values differ in count");
  MatrixPoly poly;
  if (points.empty()) return poly;
  poly.rows = values[0].rows();
  poly.cols = values[0].cols();
  std::vector<std::size_t> degrees(points.size());
  std::iota(degrees.begin(), degrees.end(), std::size_t{0});
  const Grid<u64> w = interpolation_weights(f, points, degrees);
  std::vector<const Matrix*> mats;
  for (const Matrix& v : values) mats.push_back(&v);
  for (std::size_t d = 0; d < points.size(); ++d) {
    std::vector<u64> row(w.row(d).begin(), w.row(d).end());
    poly.coeffs.push_back(linear_combination(f, row, mats));
  }
  return poly;
}

Matrix poly_eval(const PrimeField& f, const MatrixPoly& poly, u64 x) {
  Matrix acc(poly.rows, poly.cols, 0);
  for (std::size_t i = poly.coeffs.size(); i-- > 0;) {
    acc = scale(f, acc, x);
    acc = add(f, acc, poly.coeffs[i]);
  }
  return acc;
}

u64 eval_scalar(const PrimeField& f, const std::vector<u64>& coeffs, u64 x) {
  u64 acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = f.add(f.mul(acc, x), coeffs[i]);
  return acc;
}

}  // namespace cdmm
