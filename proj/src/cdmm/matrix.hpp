#pragma once

#include <random>
#include <vector>

#include "cdmm/field.hpp"
#include "cdmm/grid.hpp"

namespace cdmm {

using Matrix = Grid<u64>;
using ExponentGrid = Grid<std::int64_t>;
using BlockGrid = Grid<Matrix>;
using Rng = std::mt19937_64;

/// Multiply-accumulate counter; lets tests assert work scaling without timing.
struct WorkCounter {
  u64 macs = 0;
};

Matrix multiply(const PrimeField& f, const Matrix& a, const Matrix& b, WorkCounter* work = nullptr);
/// a^T * b without materializing the transpose.
Matrix multiply_at_b(const PrimeField& f, const Matrix& a, const Matrix& b,
                     WorkCounter* work = nullptr);
Matrix transpose(const Matrix& a);
Matrix add(const PrimeField& f, const Matrix& a, const Matrix& b);
Matrix subtract(const PrimeField& f, const Matrix& a, const Matrix& b);
/// y += c * x
void axpy(const PrimeField& f, Matrix& y, u64 c, const Matrix& x);
Matrix scale(const PrimeField& f, const Matrix& a, u64 c);
bool is_zero(const Matrix& a);

/// sum_i w[i] * m[i]; all matrices share a shape.
Matrix linear_combination(const PrimeField& f, const std::vector<u64>& weights,
                          const std::vector<const Matrix*>& mats);

Matrix random_matrix(const PrimeField& f, std::size_t rows, std::size_t cols, Rng& rng);
/// Uniform nonzero-somewhere matrix (used for corruption).
Matrix random_nonzero_matrix(const PrimeField& f, std::size_t rows, std::size_t cols, Rng& rng);
u64 random_element(const PrimeField& f, Rng& rng);

std::size_t rank(const PrimeField& f, Matrix a);

/// Row vector times matrix.
std::vector<u64> row_times(const PrimeField& f, const std::vector<u64>& r, const Matrix& a);
/// Row vector times a^T.
std::vector<u64> row_times_transpose(const PrimeField& f, const std::vector<u64>& r,
                                     const Matrix& a);

}  // namespace cdmm
