#include "ifm/io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ifm::io {

namespace {

constexpr const char* kFormat = "ifm-tensor";
constexpr int kFormatVersion = 1;

template <typename Word, typename T>
std::vector<std::uint8_t> le_bytes(std::span<const T> values) {
  static_assert(sizeof(Word) == sizeof(T));
  std::vector<std::uint8_t> out(values.size() * sizeof(T));
  for (std::size_t i = 0; i < values.size(); ++i) {
    Word w;
    std::memcpy(&w, &values[i], sizeof(T));
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      out[i * sizeof(T) + b] = static_cast<std::uint8_t>(w >> (8 * b));
    }
  }
  return out;
}

template <typename Word, typename T>
std::vector<T> from_le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % sizeof(T) != 0) {
    throw std::runtime_error("byte length " + std::to_string(bytes.size()) +
                             " is not a multiple of " + std::to_string(sizeof(T)));
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  for (std::size_t i = 0; i < out.size(); ++i) {
    Word w = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      w |= static_cast<Word>(bytes[i * sizeof(T) + b]) << (8 * b);
    }
    std::memcpy(&out[i], &w, sizeof(T));
  }
  return out;
}

std::vector<std::uint8_t> quantize_channel(const encoders::GrayImage& image) {
  std::vector<std::uint8_t> out;
  out.reserve(image.pixels.size());
  for (double v : image.pixels.values()) out.push_back(quantize(v, image.lo, image.hi));
  return out;
}

void write_png(const fs::path& path, std::uint32_t width, std::uint32_t height, bool rgb,
               const std::vector<std::uint8_t>& pixels) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = width;
  img.height = height;
  img.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write " + path.string() + ": " + img.message);
  }
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

std::vector<std::uint8_t> to_le_bytes(std::span<const float> values) {
  return le_bytes<std::uint32_t>(values);
}
std::vector<std::uint8_t> to_le_bytes(std::span<const double> values) {
  return le_bytes<std::uint64_t>(values);
}
std::vector<float> floats_from_le_bytes(std::span<const std::uint8_t> bytes) {
  return from_le<std::uint32_t, float>(bytes);
}
std::vector<double> doubles_from_le_bytes(std::span<const std::uint8_t> bytes) {
  return from_le<std::uint64_t, double>(bytes);
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

fs::path bin_path(const fs::path& stem) { return fs::path(stem.string() + ".bin"); }
fs::path header_path(const fs::path& stem) { return fs::path(stem.string() + ".json"); }

std::string write_store(const fs::path& stem, const TensorStore& store) {
  std::size_t expected = 1;
  for (auto d : store.shape) expected *= d;
  if (store.data.size() != expected) {
    throw std::invalid_argument("tensor data has " + std::to_string(store.data.size()) +
                                " values, shape implies " + std::to_string(expected));
  }
  if (store.labels.size() != store.shape[0]) {
    throw std::invalid_argument("tensor store has " + std::to_string(store.labels.size()) +
                                " labels for " + std::to_string(store.shape[0]) + " slices");
  }
  const auto bytes = to_le_bytes(std::span<const float>(store.data));
  const std::string checksum = sha256_hex(bytes);
  write_bytes(bin_path(stem), bytes);

  nlohmann::ordered_json header;
  header["format"] = kFormat;
  header["version"] = kFormatVersion;
  header["dtype"] = "float32";
  header["byte_order"] = "little";
  header["layout"] = "NCHW";
  header["shape"] = store.shape;
  header["sha256"] = checksum;
  nlohmann::ordered_json names = nlohmann::ordered_json::object();
  for (const auto& [id, name] : store.class_names) names[std::to_string(id)] = name;
  header["class_names"] = names;
  header["labels"] = store.labels;
  write_text(header_path(stem), header.dump(2) + "\n");
  return checksum;
}

TensorStore read_store(const fs::path& stem) {
  const auto header = nlohmann::json::parse(read_text(header_path(stem)));
  if (header.value("format", "") != kFormat) {
    throw std::runtime_error(header_path(stem).string() + " is not an " + kFormat + " header");
  }
  if (header.at("dtype") != "float32") {
    throw std::runtime_error("unsupported dtype " + header.at("dtype").dump());
  }
  TensorStore store;
  const auto shape = header.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 4) throw std::runtime_error("image store shape must have rank 4");
  std::copy(shape.begin(), shape.end(), store.shape.begin());
  store.labels = header.at("labels").get<std::vector<int>>();
  for (const auto& [key, name] : header.at("class_names").items()) {
    store.class_names[std::stoi(key)] = name.get<std::string>();
  }

  const auto bytes = read_bytes(bin_path(stem));
  if (sha256_hex(bytes) != header.at("sha256").get<std::string>()) {
    throw std::runtime_error("checksum mismatch for " + bin_path(stem).string());
  }
  store.data = floats_from_le_bytes(bytes);
  if (store.data.size() != store.count() * store.slice_size()) {
    throw std::runtime_error(bin_path(stem).string() + " size does not match its header shape");
  }
  if (store.labels.size() != store.count()) {
    throw std::runtime_error("label count does not match the leading dimension");
  }
  return store;
}

std::uint8_t quantize(double v, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("quantize needs hi > lo");
  const double scaled = std::round((v - lo) / (hi - lo) * 255.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

void write_png_gray(const fs::path& path, const encoders::GrayImage& image) {
  write_png(path, static_cast<std::uint32_t>(image.width()),
            static_cast<std::uint32_t>(image.height()), false, quantize_channel(image));
}

void write_png_rgb(const fs::path& path, const encoders::FusedImage& image) {
  const std::size_t side = image.side();
  std::array<std::vector<std::uint8_t>, 3> planes;
  for (std::size_t c = 0; c < 3; ++c) planes[c] = quantize_channel(image.channels[c]);
  std::vector<std::uint8_t> rgb(side * side * 3);
  for (std::size_t p = 0; p < side * side; ++p) {
    for (std::size_t c = 0; c < 3; ++c) rgb[p * 3 + c] = planes[c][p];
  }
  write_png(path, static_cast<std::uint32_t>(side), static_cast<std::uint32_t>(side), true, rgb);
}

PngInfo read_png(const fs::path& path, std::vector<std::uint8_t>* pixels) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw std::runtime_error("cannot read " + path.string() + ": " + img.message);
  }
  PngInfo info;
  info.width = img.width;
  info.height = img.height;
  info.channels = (img.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  img.format = info.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    throw std::runtime_error("cannot decode " + path.string() + ": " + img.message);
  }
  if (pixels) *pixels = std::move(buffer);
  return info;
}

}  // namespace ifm::io
