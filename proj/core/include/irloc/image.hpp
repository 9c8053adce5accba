#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "irloc/error.hpp"

namespace irloc {

/// 8-bit grayscale image, row-major.
struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return pixels[y * width + x]; }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y) { return pixels[y * width + x]; }
  bool operator==(const GrayImage&) const = default;
};

GrayImage make_image(std::uint32_t width, std::uint32_t height, std::uint8_t fill = 0);

/// Binary PGM (P5, maxval 255) only; P2 and other maxvals are rejected.
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace irloc
