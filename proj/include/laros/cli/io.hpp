#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "laros/matrix.hpp"

namespace laros::cli {

enum class MatrixFormat { kAuto, kMatrixMarketArray, kMatrixMarketCoordinate, kCsv };

/// auto, matrixmarket-array (alias mm-array), matrixmarket-coordinate
/// (alias mm-coordinate), csv. Throws InvalidParameter otherwise.
MatrixFormat parse_format(std::string_view name);
std::string to_string(MatrixFormat format);

/// kAuto reads the MatrixMarket header when present and falls back to CSV.
/// Throws ParseError (with line number) on malformed content.
DenseMatrix read_matrix(std::istream& in, MatrixFormat format);
/// Throws InvalidInput when the file cannot be opened.
DenseMatrix parse_matrix(const std::filesystem::path& path, MatrixFormat format);

/// kAuto writes the array format. Values use 17 significant digits, so the
/// array format round-trips bit for bit.
void write_matrix(std::ostream& out, const DenseMatrix& a, MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& a,
                  MatrixFormat format);

}  // namespace laros::cli
