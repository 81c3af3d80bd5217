#include "cdmm/matrix.hpp"

#include <algorithm>

namespace cdmm {

Matrix multiply(const PrimeField& f, const Matrix& a, const Matrix& b, WorkCounter* work) {
  if (a.cols() != b.rows()) fail(ErrorCode::shape_mismatch, "inner dimensions differ");
  Matrix c(a.rows(), b.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const u64 aik = a(i, k);
      if (aik == 0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] = f.add(crow[j], f.mul(aik, brow[j]));
    }
  }
  if (work) work->macs += static_cast<u64>(a.rows()) * a.cols() * b.cols();
  return c;
}

Matrix multiply_at_b(const PrimeField& f, const Matrix& a, const Matrix& b, WorkCounter* work) {
  if (a.rows() != b.rows()) fail(ErrorCode::shape_mismatch, "row counts differ for a^T b");
  Matrix c(a.cols(), b.cols(), 0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const u64 aki = arow[i];
      if (aki == 0) continue;
      auto crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] = f.add(crow[j], f.mul(aki, brow[j]));
    }
  }
  if (work) work->macs += static_cast<u64>(a.rows()) * a.cols() * b.cols();
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const PrimeField& f, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::shape_mismatch, "add shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = f.add(c.data()[i], b.data()[i]);
  return c;
}

Matrix subtract(const PrimeField& f, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::shape_mismatch, "subtract shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = f.sub(c.data()[i], b.data()[i]);
  return c;
}

void axpy(const PrimeField& f, Matrix& y, u64 c, const Matrix& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols()) fail(ErrorCode::shape_mismatch, "axpy shapes differ");
  if (c == 0) return;
  auto& yd = y.data();
  const auto& xd = x.data();
  for (std::size_t i = 0; i < yd.size(); ++i) yd[i] = f.add(yd[i], f.mul(c, xd[i]));
}

Matrix scale(const PrimeField& f, const Matrix& a, u64 c) {
  Matrix out = a;
  for (u64& v : out.data()) v = f.mul(v, c);
  return out;
}

bool is_zero(const Matrix& a) {
  return std::all_of(a.begin(), a.end(), [](u64 v) { return v == 0; });
}

Matrix linear_combination(const PrimeField& f, const std::vector<u64>& weights,
                          const std::vector<const Matrix*>& mats) {
  if (weights.size() != mats.size() || mats.empty()) fail(ErrorCode::shape_mismatch, "weights and matrices differ in count");
  Matrix out(mats[0]->rows(), mats[0]->cols(), 0);
  for (std::size_t i = 0; i < mats.size(); ++i) axpy(f, out, weights[i], *mats[i]);
  return out;
}

u64 random_element(const PrimeField& f, Rng& rng) {
  std::uniform_int_distribution<u64> dist(0, f.modulus() - 1);
  return dist(rng);
}

Matrix random_matrix(const PrimeField& f, std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (u64& v : m.data()) v = random_element(f, rng);
  return m;
}

Matrix random_nonzero_matrix(const PrimeField& f, std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m;
  do {
    m = random_matrix(f, rows, cols, rng);
  } while (is_zero(m));
  return m;
}

std::size_t rank(const PrimeField& f, Matrix a) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < a.cols() && r < a.rows(); ++col) {
    std::size_t pivot = r;
    while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(pivot, j), a(r, j));
    const u64 inv = f.inv(a(r, col));
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      const u64 factor = f.mul(a(i, col), inv);
      if (factor == 0) continue;
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) = f.sub(a(i, j), f.mul(factor, a(r, j)));
    }
    ++r;
  }
  return r;
}

std::vector<u64> row_times(const PrimeField& f, const std::vector<u64>& r, const Matrix& a) {
  if (r.size() != a.rows()) fail(ErrorCode::shape_mismatch, "row vector length differs from matrix rows");
  std::vector<u64> out(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (r[i] == 0) continue;
    auto arow = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] = f.add(out[j], f.mul(r[i], arow[j]));
  }
  return out;
}

std::vector<u64> row_times_transpose(const PrimeField& f, const std::vector<u64>& r,
                                     const Matrix& a) {
  if (r.size() != a.cols()) fail(ErrorCode::shape_mismatch, "row vector length differs from matrix cols");
  std::vector<u64> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    u64 acc = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc = f.add(acc, f.mul(r[j], arow[j]));
    out[i] = acc;
  }
  return out;
}

}  // namespace cdmm
