#include "gsm/bench/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <sstream>

namespace gsm {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  std::size_t b = s.find_first_not_of(" \t\r\"");
  std::size_t e = s.find_last_not_of(" \t\r\"");
  if (b == std::string::npos) throw ConfigError(path + ":" + std::to_string(line) + ": empty field");
  double v = 0.0;
  const auto res = std::from_chars(s.data() + b, s.data() + e + 1, v);
  if (res.ec != std::errc() || res.ptr != s.data() + e + 1)
    throw ConfigError(path + ":" + std::to_string(line) + ": not a number '" + s.substr(b, e - b + 1) + "'");
  return v;
}

bool little_endian() { return std::endian::native == std::endian::little; }

std::uint64_t bswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xFF);
  return r;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  if (!little_endian()) v = bswap64(v);
  out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return little_endian() ? v : bswap64(v);
}

constexpr std::array<char, 8> kMagic{'G', 'S', 'M', 'M', 'A', 'T', '1', '\0'};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_double(field, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("'" + path + "' contains no data");
  Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) A(i, j) = rows[i][j];
  return A;
}

void write_matrix_csv(const std::string& path, const Matrix& A) {
  auto out = open_out(path);
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << format_double(A(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

Matrix read_matrix_binary(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  std::array<char, 8> magic{};
  in.read(magic.data(), 8);
  if (!in || magic != kMagic) throw ConfigError("'" + path + "' is not a GSMMAT1 file");
  const std::uint64_t rows = get_u64(in), cols = get_u64(in);
  if (!in || rows == 0 || cols == 0 || rows > (1ULL << 32) || cols > (1ULL << 32))
    throw ConfigError("'" + path + "': invalid dimensions");
  Matrix A(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      const std::uint64_t bits = get_u64(in);
      A(i, j) = std::bit_cast<double>(bits);
    }
  if (!in) throw ConfigError("'" + path + "': truncated data");
  return A;
}

void write_matrix_binary(const std::string& path, const Matrix& A) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMagic.data(), 8);
  put_u64(out, static_cast<std::uint64_t>(A.rows()));
  put_u64(out, static_cast<std::uint64_t>(A.cols()));
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(A(i, j)));
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

Matrix read_matrix(const std::string& path) {
  return ends_with(path, ".bin") ? read_matrix_binary(path) : read_matrix_csv(path);
}

void write_matrix(const std::string& path, const Matrix& A) {
  if (ends_with(path, ".bin"))
    write_matrix_binary(path, A);
  else
    write_matrix_csv(path, A);
}

Vector read_vector(const std::string& path) {
  const Matrix M = read_matrix(path);
  if (M.cols() == 1) return M.col(0);
  if (M.rows() == 1) return M.row(0).transpose();
  throw ConfigError("'" + path + "' is not a vector");
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(open_out(path)), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ConfigError("CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
  out_.flush();
  if (!out_) throw ConfigError("CsvWriter: write failed");
}

}  // namespace gsm
