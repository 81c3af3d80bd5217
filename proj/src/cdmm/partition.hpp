#pragma once

#include <iosfwd>
#include <string>

#include "cdmm/matrix.hpp"

namespace cdmm {

struct PartitionSpec {
  std::size_t rows_a = 0;  // a
  std::size_t cols_a = 0;  // b
  std::size_t cols_b = 0;  // c
  std::size_t K1 = 1;
  std::size_t m = 1;
  std::size_t K2 = 1;
};

/// A as a K1 x m grid of equal blocks.
BlockGrid partition_a(const Matrix& a, const PartitionSpec& spec);
/// B as an m x K2 grid of equal blocks.
BlockGrid partition_b(const Matrix& b, const PartitionSpec& spec);
/// Concatenates a grid of blocks back into one matrix.
Matrix assemble(const BlockGrid& blocks);
/// Alias of assemble for the K1 x K2 output grid.
inline Matrix assemble_c(const BlockGrid& blocks) { return assemble(blocks); }

/// Block product C_{i,j} = sum_k A_{i,k} B_{k,j}.
BlockGrid block_product(const PrimeField& f, const BlockGrid& a, const BlockGrid& b);

/// Zero-pads to the next multiple in each dimension.
Matrix pad_to_multiple(const Matrix& a, std::size_t row_multiple, std::size_t col_multiple);
Matrix crop(const Matrix& a, std::size_t rows, std::size_t cols);

/// Text format: "rows cols modulus" header then one row per line.
void write_matrix(std::ostream& out, const Matrix& a, u64 modulus);
Matrix read_matrix(std::istream& in, u64* modulus = nullptr);
void write_matrix_file(const std::string& path, const Matrix& a, u64 modulus);
Matrix read_matrix_file(const std::string& path, u64* modulus = nullptr);

}  // namespace cdmm
