#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scatterlab/core.hpp"

/// RWF1 binary field files and CSV summaries.
///
/// RWF1 layout, all integers and reals little-endian:
///   "RWF1" | dtype u8 (0 real f64, 1 complex f64 pair) | ndim u8 | components u8 | 5 zero bytes
///   | ndim x u64 dims | ndim x f64 lower corner | ndim x f64 upper corner
///   | node data, row-major with components innermost.
namespace scatterlab::io {

struct FieldHeader {
  bool complex_valued = false;
  int ndim = 2;
  int components = 1;
  std::vector<std::uint64_t> dims;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t data_bytes() const;
};

/// Real fields are stored as real parts; complex fields as interleaved pairs.
void write_field(const std::filesystem::path& path, const FieldSample& field);
std::vector<unsigned char> encode_field(const FieldSample& field);

FieldSample read_field(const std::filesystem::path& path);
FieldSample decode_field(const std::vector<unsigned char>& bytes);

FieldHeader read_header(const std::filesystem::path& path);

/// Human-readable header summary, one key per line.
std::string describe(const FieldHeader& header);

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

using CsvRow = std::vector<std::string>;

void write_csv(const std::filesystem::path& path, const CsvRow& header, const std::vector<CsvRow>& rows);

}  // namespace scatterlab::io
