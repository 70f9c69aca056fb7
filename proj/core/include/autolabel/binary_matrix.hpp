#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace autolabel {

/// Dense row-major f32 matrix, the in-memory image of an ALEB file.
class FloatMatrix {
 public:
  FloatMatrix() = default;
  FloatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}
  FloatMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<float>& data() const noexcept { return data_; }

  /// Bitwise equality, so -0.0f != 0.0f and NaN payloads are compared exactly.
  friend bool operator==(const FloatMatrix& a, const FloatMatrix& b) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// ALEB layout: "ALEB" | u32 version | u32 rows | u32 cols | rows*cols f32,
// all little-endian, row-major, no padding and no trailer.
inline constexpr std::uint32_t kAlebVersion = 1;

std::vector<std::byte> encode_aleb(const FloatMatrix& m);

/// Errors: MagicMismatch, VersionMismatch, ShapeMismatch (truncated or
/// trailing bytes). `context` names the file in error messages.
FloatMatrix decode_aleb(std::span<const std::byte> bytes, const std::string& context);

/// Errors: MissingFile, IoError, plus everything decode_aleb reports.
FloatMatrix read_aleb(const std::filesystem::path& path);
void write_aleb(const FloatMatrix& m, const std::filesystem::path& path);

}  // namespace autolabel
