#include "autolabel/binary_matrix.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "autolabel/error.hpp"

namespace autolabel {
namespace {

constexpr std::byte kMagic[4] = {std::byte{'A'}, std::byte{'L'}, std::byte{'E'}, std::byte{'B'}};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

}  // namespace

FloatMatrix::FloatMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::ShapeMismatch, "matrix data has " + std::to_string(data_.size()) +
                                              " values, expected " + std::to_string(rows_ * cols_));
  }
}

bool operator==(const FloatMatrix& a, const FloatMatrix& b) noexcept {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  return a.data_.empty() ||
         std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

std::vector<std::byte> encode_aleb(const FloatMatrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) {
    throw Error(ErrorKind::ShapeMismatch, "matrix too large for the ALEB header");
  }
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + m.data().size() * 4);
  for (std::byte b : kMagic) out.push_back(b);
  put_u32(out, kAlebVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (float f : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FloatMatrix decode_aleb(std::span<const std::byte> bytes, const std::string& context) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::MagicMismatch, context + ": missing ALEB magic");
  }
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorKind::ShapeMismatch, context + ": truncated header");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kAlebVersion) {
    throw Error(ErrorKind::VersionMismatch,
                context + ": version " + std::to_string(version) + ", expected " + std::to_string(kAlebVersion));
  }
  const std::size_t rows = get_u32(bytes, 8);
  const std::size_t cols = get_u32(bytes, 12);
  const std::size_t expected = kHeaderSize + rows * cols * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorKind::ShapeMismatch, context + ": header declares " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " (" + std::to_string(expected) +
                                              " bytes) but file has " + std::to_string(bytes.size()));
  }
  std::vector<float> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
  }
  return FloatMatrix(rows, cols, std::move(data));
}

FloatMatrix read_aleb(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::MissingFile, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed for " + path.string());
  const auto* first = reinterpret_cast<const std::byte*>(raw.data());
  return decode_aleb(std::span<const std::byte>(first, raw.size()), path.string());
}

void write_aleb(const FloatMatrix& m, const std::filesystem::path& path) {
  const auto bytes = encode_aleb(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace autolabel
