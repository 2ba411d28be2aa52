#include "vrnmf/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace vrnmf::io {
namespace fs = std::filesystem;

namespace {

MatrixFormat resolve(const fs::path& path, MatrixFormat format) {
  if (format != MatrixFormat::kAuto) return format;
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? MatrixFormat::kCsv : MatrixFormat::kBinary;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write to " + path.string() + " failed");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  v = to_le(v);
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  out.append(raw, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return to_le(v);
}

NonnegativeMatrix parse_binary(std::string_view bytes, const std::string& name) {
  const std::size_t header = kBinaryMagic.size() + 2 * sizeof(std::uint64_t);
  if (bytes.size() < header || bytes.substr(0, kBinaryMagic.size()) != kBinaryMagic) {
    throw FormatError(name + ": missing NNMF1 header");
  }
  const auto rows = get<std::uint64_t>(bytes, kBinaryMagic.size());
  const auto cols = get<std::uint64_t>(bytes, kBinaryMagic.size() + 8);
  if (rows != 0 && cols > (bytes.size() / sizeof(double)) / rows) {
    throw FormatError(name + ": declared shape exceeds file size");
  }
  const std::size_t count = rows * cols;
  if (bytes.size() != header + count * sizeof(double)) {
    throw FormatError(name + ": payload holds " + std::to_string(bytes.size() - header) +
                      " bytes, expected " + std::to_string(count * sizeof(double)));
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = get<double>(bytes, header + i * sizeof(double));
    if (!std::isfinite(x) || x < 0.0) {
      throw FormatError(name + ": entry (" + std::to_string(i / cols) + "," +
                        std::to_string(i % cols) + ") is not a finite nonnegative number");
    }
    data[i] = x;
  }
  return NonnegativeMatrix(Matrix(rows, cols, std::move(data)));
}

}  // namespace

NonnegativeMatrix parse_csv(std::string_view text) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (trim(line).empty()) continue;

    std::size_t field = 0;
    while (true) {
      ++field;
      const std::size_t comma = line.find(',');
      const std::string_view token = trim(line.substr(0, comma));
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
      if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
        throw FormatError("CSV: non-numeric token '" + std::string(token) + "'", line_no, field);
      }
      if (!std::isfinite(x) || x < 0.0) {
        throw FormatError("CSV: entry " + std::string(token) + " is not a finite nonnegative number",
                          line_no, field);
      }
      data.push_back(x);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (rows == 0) {
      cols = field;
    } else if (field != cols) {
      throw FormatError("CSV: row has " + std::to_string(field) + " fields, expected " +
                            std::to_string(cols),
                        line_no, field);
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("CSV: no data rows");
  return NonnegativeMatrix(Matrix(rows, cols, std::move(data)));
}

std::string format_csv(const Matrix& m) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out.push_back(',');
      // Shortest representation that round-trips exactly.
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

NonnegativeMatrix load_matrix(const fs::path& path, MatrixFormat format) {
  const std::string bytes = read_file(path);
  if (resolve(path, format) == MatrixFormat::kCsv) {
    try {
      return parse_csv(bytes);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return parse_binary(bytes, path.string());
}

void save_matrix(const fs::path& path, const Matrix& m, MatrixFormat format) {
  if (resolve(path, format) == MatrixFormat::kCsv) {
    write_file(path, format_csv(m));
    return;
  }
  std::string out;
  out.reserve(kBinaryMagic.size() + 16 + m.size() * sizeof(double));
  out.append(kBinaryMagic);
  put<std::uint64_t>(out, m.rows());
  put<std::uint64_t>(out, m.cols());
  for (double x : m.values()) put<double>(out, x);
  write_file(path, out);
}

namespace {

// Reads the next whitespace-separated PGM header token, skipping comments.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

std::size_t header_number(std::string_view bytes, std::size_t& pos, const std::string& name,
                          const char* what) {
  const std::string_view tok = next_token(bytes, pos);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(name + ": bad PGM " + what + " '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  const std::string bytes = read_file(path);
  const std::string name = path.string();
  std::size_t pos = 0;
  const std::string_view magic = next_token(bytes, pos);
  if (magic != "P2" && magic != "P5") throw FormatError(name + ": not a P2/P5 PGM file");
  GrayImage img;
  img.width = header_number(bytes, pos, name, "width");
  img.height = header_number(bytes, pos, name, "height");
  const std::size_t maxval = header_number(bytes, pos, name, "maxval");
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError(name + ": invalid PGM dimensions or maxval");
  }
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      img.pixels[i] = static_cast<double>(header_number(bytes, pos, name, "pixel"));
    }
    return img;
  }
  ++pos;  // single whitespace after maxval
  const std::size_t depth = maxval < 256 ? 1 : 2;
  if (bytes.size() < pos + count * depth) throw FormatError(name + ": truncated P5 raster");
  for (std::size_t i = 0; i < count; ++i) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * depth);
    img.pixels[i] = depth == 1 ? p[0] : static_cast<double>((p[0] << 8) | p[1]);
  }
  return img;
}

void write_pgm(const fs::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels) {
  if (pixels.size() != width * height) {
    throw DimensionError("write_pgm: pixel count does not match width*height");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  write_file(path, out);
}

Matrix load_image_dir_raw(const fs::path& dir, std::size_t width, std::size_t height,
                          double max_level) {
  if (!(max_level > 0.0)) throw DomainError("load_image_dir: max_level must be > 0");
  if (!fs::is_directory(dir)) throw FormatError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm" || ext == ".pnm") files.push_back(entry.path());
  }
  if (files.empty()) throw FormatError(dir.string() + ": no PGM images found");
  std::sort(files.begin(), files.end());

  Matrix v(width * height, files.size());
  for (std::size_t n = 0; n < files.size(); ++n) {
    const GrayImage img = read_pgm(files[n]);
    if (img.width != width || img.height != height) {
      throw FormatError(files[n].string() + ": image is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    for (std::size_t f = 0; f < img.pixels.size(); ++f) {
      v(f, n) = std::min(img.pixels[f], max_level);
    }
  }
  return v;
}

NonnegativeMatrix load_image_dir(const fs::path& dir, std::size_t width, std::size_t height,
                                 double max_level) {
  Matrix v = load_image_dir_raw(dir, width, height, max_level);
  for (double& x : v.values()) x /= max_level;
  return NonnegativeMatrix(std::move(v));
}

std::string matrix_digest(const Matrix& m, std::uint64_t salt) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      hash ^= (word >> (8 * i)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(m.rows());
  mix(m.cols());
  mix(salt);
  for (double x : m.values()) mix(std::bit_cast<std::uint64_t>(x));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace vrnmf::io
