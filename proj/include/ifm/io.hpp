#pragma once

// On-disk formats.
//
// Tensor store: <stem>.bin holds raw little-endian IEEE floats in row-major
// order; <stem>.json is the sidecar header (dtype, shape, labels, class names,
// SHA-256 of the .bin). Image stores use float32 with shape [N, C, H, W].
//
// PNG: 8-bit grayscale or RGB. A pixel v with declared range [lo, hi] maps to
// round((v - lo) / (hi - lo) * 255), rounding half away from zero.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ifm/encoders.hpp"

namespace ifm::io {

namespace fs = std::filesystem;

using ClassNames = std::map<int, std::string>;

/// Image tensor with one label per leading-axis slice.
struct TensorStore {
  std::array<std::size_t, 4> shape{0, 3, 0, 0};  ///< N, C, H, W
  std::vector<float> data;
  std::vector<int> labels;
  ClassNames class_names;

  std::size_t count() const { return shape[0]; }
  std::size_t slice_size() const { return shape[1] * shape[2] * shape[3]; }
  std::span<const float> slice(std::size_t i) const {
    return std::span<const float>(data).subspan(i * slice_size(), slice_size());
  }

  bool operator==(const TensorStore&) const = default;
};

/// Hex SHA-256 of a byte buffer or a file.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const fs::path& path);

/// Little-endian byte images of float arrays.
std::vector<std::uint8_t> to_le_bytes(std::span<const float> values);
std::vector<std::uint8_t> to_le_bytes(std::span<const double> values);
std::vector<float> floats_from_le_bytes(std::span<const std::uint8_t> bytes);
std::vector<double> doubles_from_le_bytes(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

fs::path bin_path(const fs::path& stem);
fs::path header_path(const fs::path& stem);

/// Writes <stem>.bin and <stem>.json; returns the checksum of the .bin.
std::string write_store(const fs::path& stem, const TensorStore& store);

/// Throws std::runtime_error on a missing file, shape/size mismatch or a
/// checksum mismatch.
TensorStore read_store(const fs::path& stem);

/// 8-bit code for v in [lo, hi].
std::uint8_t quantize(double v, double lo, double hi);

struct PngInfo {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
};

void write_png_gray(const fs::path& path, const encoders::GrayImage& image);
void write_png_rgb(const fs::path& path, const encoders::FusedImage& image);

/// Reads the header and the decoded 8-bit pixels (interleaved for RGB).
PngInfo read_png(const fs::path& path, std::vector<std::uint8_t>* pixels = nullptr);

}  // namespace ifm::io
