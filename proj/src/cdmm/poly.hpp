#pragma once

#include <vector>

#include "cdmm/matrix.hpp"

namespace cdmm {

/// Polynomial with matrix coefficients; coeffs[i] multiplies x^i.
struct MatrixPoly {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Matrix> coeffs;

  /// Highest index with a nonzero coefficient, -1 for the zero polynomial.
  long degree() const;
};

/// Interpolation weights: W(t, i) is the contribution of value i to the
/// coefficient of x^degrees[t] in the unique polynomial of degree < |points|.
Grid<u64> interpolation_weights(const PrimeField& f, const std::vector<u64>& points,
                                const std::vector<std::size_t>& degrees);

MatrixPoly vandermonde_interpolate(const PrimeField& f, const std::vector<u64>& points,
                                   const std::vector<Matrix>& values);

Matrix poly_eval(const PrimeField& f, const MatrixPoly& poly, u64 x);

/// Scalar Horner evaluation; coeffs ascending.
u64 eval_scalar(const PrimeField& f, const std::vector<u64>& coeffs, u64 x);

/// Applies a scalar sequence transform entrywise to a sequence of matrices.
template <class Fn>
std::vector<Matrix> transform_entries(const std::vector<const Matrix*>& values, Fn&& fn) {
  std::vector<Matrix> out;
  if (values.empty()) return out;
  const std::size_t rows = values[0]->rows();
  const std::size_t cols = values[0]->cols();
  std::vector<u64> column(values.size());
  std::vector<std::vector<u64>> transformed(rows * cols);
  for (std::size_t e = 0; e < rows * cols; ++e) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i]->rows() != rows || values[i]->cols() != cols) fail(ErrorCode::shape_mismatch, "matrix shapes differ");
      column[i] = values[i]->data()[e];
    }
    transformed[e] = fn(column);
  }
  const std::size_t n = transformed.empty() ? 0 : transformed[0].size();
  out.assign(n, Matrix(rows, cols));
  for (std::size_t e = 0; e < rows * cols; ++e)
    for (std::size_t i = 0; i < n; ++i) out[i].data()[e] = transformed[e][i];
  return out;
}

}  // namespace cdmm
