#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "doctest.h"
#include "ifm/io.hpp"
#include "temp_dir.hpp"

using namespace ifm;
using namespace ifm::io;

TEST_CASE("quantize maps declared ranges onto 8-bit codes") {
  // GAF range [-1, 1]: (v + 1) / 2 * 255, half away from zero.
  CHECK(quantize(-1.0, -1, 1) == 0);
  CHECK(quantize(0.0, -1, 1) == 128);
  CHECK(quantize(1.0, -1, 1) == 255);
  // RP / MTF range [0, 1].
  CHECK(quantize(0.0, 0, 1) == 0);
  CHECK(quantize(1.0, 0, 1) == 255);
  CHECK(quantize(0.5, 0, 1) == 128);
  CHECK(quantize(0.6 / 255.0, 0, 1) == 1);
  CHECK(quantize(0.4 / 255.0, 0, 1) == 0);
  CHECK(quantize(1.5, 0, 1) == 255);
  CHECK(quantize(-0.5, 0, 1) == 0);
  CHECK_THROWS_AS(quantize(0.0, 1, 1), std::invalid_argument);
}

TEST_CASE("tensor store round-trips bit-exactly") {
  TempDir dir;
  std::mt19937 rng(9);
  std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
  TensorStore store;
  store.shape = {3, 3, 4, 4};
  store.data.resize(3 * 3 * 4 * 4);
  for (auto& v : store.data) v = dist(rng);
  store.data[0] = -0.0f;
  store.data[1] = std::numeric_limits<float>::denorm_min();
  store.data[2] = std::numeric_limits<float>::max();
  store.labels = {2, 0, 1};
  store.class_names = {{0, "N"}, {1, "S"}, {2, "V"}};

  const auto sum = write_store(dir.path() / "s", store);
  CHECK(sum == sha256_file(dir.path() / "s.bin"));
  CHECK(std::filesystem::file_size(dir.path() / "s.bin") == store.data.size() * 4);
  const auto back = read_store(dir.path() / "s");
  CHECK(back.shape == store.shape);
  CHECK(back.labels == store.labels);
  CHECK(back.class_names == store.class_names);
  REQUIRE(back.data.size() == store.data.size());
  CHECK(std::memcmp(back.data.data(), store.data.data(), store.data.size() * sizeof(float)) == 0);
}

TEST_CASE("tensor bytes are little-endian IEEE") {
  const std::vector<float> one{1.0f};
  CHECK(to_le_bytes(std::span<const float>(one)) == std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3f});
  const std::vector<double> two{2.0};
  CHECK(to_le_bytes(std::span<const double>(two)) ==
        std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0, 0x40});
}

TEST_CASE("empty store has a valid header") {
  TempDir dir;
  TensorStore store;
  store.shape = {0, 3, 8, 8};
  write_store(dir.path() / "e", store);
  const auto back = read_store(dir.path() / "e");
  CHECK(back.count() == 0);
  CHECK(back.shape == store.shape);
}

TEST_CASE("tampered or inconsistent stores are rejected") {
  TempDir dir;
  TensorStore store;
  store.shape = {1, 3, 2, 2};
  store.data.assign(12, 0.25f);
  store.labels = {0};
  store.class_names = {{0, "a"}};
  write_store(dir.path() / "t", store);
  auto bytes = read_bytes(dir.path() / "t.bin");
  bytes[5] ^= 1;
  write_bytes(dir.path() / "t.bin", bytes);
  CHECK_THROWS_WITH(read_store(dir.path() / "t"), doctest::Contains("checksum"));

  store.labels = {};
  CHECK_THROWS_AS(write_store(dir.path() / "u", store), std::invalid_argument);
  store.labels = {0};
  store.data.pop_back();
  CHECK_THROWS_AS(write_store(dir.path() / "u", store), std::invalid_argument);
  CHECK_THROWS_AS(read_store(dir.path() / "missing"), std::runtime_error);
}

TEST_CASE("sha256 of a known vector") {
  const std::string abc = "abc";
  CHECK(sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("png writer stores quantized pixels") {
  TempDir dir;
  encoders::GrayImage gaf{Matrix(1, 3), -1, 1, encoders::ImageKind::Gaf};
  gaf.pixels(0, 0) = -1;
  gaf.pixels(0, 1) = 0;
  gaf.pixels(0, 2) = 1;
  write_png_gray(dir.path() / "g.png", gaf);
  std::vector<std::uint8_t> px;
  const auto info = read_png(dir.path() / "g.png", &px);
  CHECK(info.width == 3);
  CHECK(info.height == 1);
  CHECK(info.channels == 1);
  CHECK(px == std::vector<std::uint8_t>{0, 128, 255});

  encoders::FusedImage fused;
  fused.channels[0] = encoders::GrayImage{Matrix(2, 2, 1.0), -1, 1, encoders::ImageKind::Gaf};
  fused.channels[1] = encoders::GrayImage{Matrix(2, 2, 0.0), 0, 1, encoders::ImageKind::Rp};
  fused.channels[2] = encoders::GrayImage{Matrix(2, 2, 1.0), 0, 1, encoders::ImageKind::Mtf};
  write_png_rgb(dir.path() / "f.png", fused);
  const auto rgb = read_png(dir.path() / "f.png", &px);
  CHECK(rgb.channels == 3);
  CHECK(rgb.width == 2);
  CHECK(px == std::vector<std::uint8_t>{255, 0, 255, 255, 0, 255, 255, 0, 255, 255, 0, 255});
}
