#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "vrnmf/matrix.hpp"

namespace vrnmf::io {

enum class MatrixFormat {
  kAuto,    // ".csv" extension selects CSV, anything else binary
  kCsv,     // comma-separated rows, newline-terminated, no header
  kBinary,  // "NNMF1", u64 rows, u64 cols, row-major f64, all little-endian
};

inline constexpr std::string_view kBinaryMagic = "NNMF1";

// Loaders validate every entry; malformed input raises FormatError carrying
// the 1-based line and field (CSV) or byte offset context (binary).
NonnegativeMatrix load_matrix(const std::filesystem::path& path,
                              MatrixFormat format = MatrixFormat::kAuto);
void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 MatrixFormat format = MatrixFormat::kAuto);

NonnegativeMatrix parse_csv(std::string_view text);
std::string format_csv(const Matrix& m);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;  // row-major, raw levels
};

// Plain (P2) or raw (P5) PGM.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels);

// Every *.pgm / *.pnm regular file in `dir`, sorted by file name, becomes one
// column of the result (F = width * height, row-major pixel order). Pixel
// levels are clamped at max_level. The _raw variant keeps the clamped levels;
// load_image_dir divides them by max_level.
Matrix load_image_dir_raw(const std::filesystem::path& dir, std::size_t width, std::size_t height,
                          double max_level);
NonnegativeMatrix load_image_dir(const std::filesystem::path& dir, std::size_t width,
                                 std::size_t height, double max_level);

// 64-bit FNV-1a over the shape and the IEEE bytes of the entries plus `salt`,
// rendered as 16 lowercase hex digits.
std::string matrix_digest(const Matrix& m, std::uint64_t salt = 0);

}  // namespace vrnmf::io
