#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "sharpcs/linalg.hpp"

namespace sharpcs {

// Dense matrix text format: a first line "n p", then n*p whitespace-separated
// values in row-major order. Vectors are stored as n x 1 (or 1 x n) matrices.
// Parse failures throw Error(kParse) with a "name:line:column: message" prefix.

DenseMatrix parse_matrix(std::string_view text, std::string_view source_name = "<input>");
DenseMatrix read_matrix_file(const std::filesystem::path& path);
Vector read_vector_file(const std::filesystem::path& path);

std::string format_matrix(const DenseMatrix& a);
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a);
void write_vector_file(const std::filesystem::path& path, std::span<const double> v);

/// Shortest round-trip representation with 17 significant digits.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling file and renames it into place.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sharpcs
