#pragma once

// CSV and binary matrix files. Binary layout: the 8 bytes "GSMMAT1\0", rows
// and cols as little-endian uint64, then row-major little-endian doubles.

#include "gsm/types.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace gsm {

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

// Numeric CSV without a header; blank lines are skipped.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& A);

Matrix read_matrix_binary(const std::string& path);
void write_matrix_binary(const std::string& path, const Matrix& A);

// Dispatch on the extension: ".bin" is binary, anything else CSV.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& A);

// A single row or a single column.
Vector read_vector(const std::string& path);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace gsm
