#include "cdmm/partition.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cdmm {
namespace {

BlockGrid split(const Matrix& a, std::size_t grid_rows, std::size_t grid_cols) {
  if (grid_rows == 0 || grid_cols == 0 || a.rows() % grid_rows != 0 || a.cols() % grid_cols != 0) {
    fail(ErrorCode::indivisible_dimensions, "matrix dimensions are not divisible by the block counts");
  }
  const std::size_t br = a.rows() / grid_rows;
  const std::size_t bc = a.cols() / grid_cols;
  BlockGrid out(grid_rows, grid_cols);
  for (std::size_t j = 0; j < grid_rows; ++j) {
    for (std::size_t k = 0; k < grid_cols; ++k) {
      Matrix block(br, bc);
      for (std::size_t r = 0; r < br; ++r)
        for (std::size_t c = 0; c < bc; ++c) block(r, c) = a(j * br + r, k * bc + c);
      out(j, k) = std::move(block);
    }
  }
  return out;
}

}  // namespace

BlockGrid partition_a(const Matrix& a, const PartitionSpec& spec) {
  if ((spec.rows_a && spec.rows_a != a.rows()) || (spec.cols_a && spec.cols_a != a.cols())) {
    fail(ErrorCode::shape_mismatch, "A does not match the partition shape");
  }
  return split(a, spec.K1, spec.m);
}

BlockGrid partition_b(const Matrix& b, const PartitionSpec& spec) {
  if ((spec.cols_a && spec.cols_a != b.rows()) || (spec.cols_b && spec.cols_b != b.cols())) {
    fail(ErrorCode::shape_mismatch, "B does not match the partition shape");
  }
  return split(b, spec.m, spec.K2);
}

Matrix assemble(const BlockGrid& blocks) {
  if (blocks.empty()) return {};
  const std::size_t br = blocks(0, 0).rows();
  const std::size_t bc = blocks(0, 0).cols();
  Matrix out(blocks.rows() * br, blocks.cols() * bc);
  for (std::size_t i = 0; i < blocks.rows(); ++i) {
    for (std::size_t j = 0; j < blocks.cols(); ++j) {
      const Matrix& b = blocks(i, j);
      if (b.rows() != br || b.cols() != bc) fail(ErrorCode::shape_mismatch, "blocks differ in shape");
      for (std::size_t r = 0; r < br; ++r)
        for (std::size_t c = 0; c < bc; ++c) out(i * br + r, j * bc + c) = b(r, c);
    }
  }
  return out;
}

BlockGrid block_product(const PrimeField& f, const BlockGrid& a, const BlockGrid& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::shape_mismatch, "block grids do not conform");
  BlockGrid c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Matrix acc = multiply(f, a(i, 0), b(0, j));
      for (std::size_t k = 1; k < a.cols(); ++k) acc = add(f, acc, multiply(f, a(i, k), b(k, j)));
      c(i, j) = std::move(acc);
    }
  }
  return c;
}

Matrix pad_to_multiple(const Matrix& a, std::size_t row_multiple, std::size_t col_multiple) {
  if (row_multiple == 0 || col_multiple == 0) fail(ErrorCode::invalid_argument, "multiples must be positive");
  const std::size_t rows = (a.rows() + row_multiple - 1) / row_multiple * row_multiple;
  const std::size_t cols = (a.cols() + col_multiple - 1) / col_multiple * col_multiple;
  Matrix out(rows, cols, 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  return out;
}

Matrix crop(const Matrix& a, std::size_t rows, std::size_t cols) {
  if (rows > a.rows() || cols > a.cols()) fail(ErrorCode::shape_mismatch, "crop exceeds matrix");
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = a(i, j);
  return out;
}

void write_matrix(std::ostream& out, const Matrix& a, u64 modulus) {
  out << a.rows() << ' ' << a.cols() << ' ' << modulus << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in, u64* modulus) {
  std::size_t rows = 0, cols = 0;
  u64 p = 0;
  if (!(in >> rows >> cols >> p)) fail(ErrorCode::io_error, "malformed matrix header");
  Matrix a(rows, cols);
  for (u64& v : a.data()) {
    if (!(in >> v)) fail(ErrorCode::io_error, "matrix file ended early");
    if (p != 0 && v >= p) fail(ErrorCode::io_error, "matrix entry not reduced modulo p");
  }
  std::string trailing;
  if (in >> trailing) fail(ErrorCode::io_error, "unexpected trailing data in matrix file");
  if (modulus) *modulus = p;
  return a;
}

void write_matrix_file(const std::string& path, const Matrix& a, u64 modulus) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path + " for writing");
  write_matrix(out, a, modulus);
  if (!out) fail(ErrorCode::io_error, "write to " + path + " failed");
}

Matrix read_matrix_file(const std::string& path, u64* modulus) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  return read_matrix(in, modulus);
}

}  // namespace cdmm
