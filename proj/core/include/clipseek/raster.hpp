#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace clipseek {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/**
 * Row-major 8-bit RGB pixel grid. Pixel (x, y) lives at index y * width + x.
 */
class RgbRaster {
 public:
  RgbRaster() = default;
  RgbRaster(int width, int height, Rgb fill = {});
  RgbRaster(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<Rgb> pixels() noexcept { return pixels_; }

  friend bool operator==(const RgbRaster&, const RgbRaster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Row-major 8-bit gray pixel grid.
class GrayRaster {
 public:
  GrayRaster() = default;
  GrayRaster(int width, int height, std::uint8_t fill = 0);
  GrayRaster(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayRaster&, const GrayRaster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct GrayHistogram {
  std::array<std::uint32_t, 256> bins{};

  std::uint64_t total() const noexcept;
  friend bool operator==(const GrayHistogram&, const GrayHistogram&) = default;
};

// Side length of the canonical downscale every frame comparison and bucket
// assignment runs on. 30 * 30 = 900 pixels.
inline constexpr int kCanonicalSide = 30;
inline constexpr int kCanonicalPixels = kCanonicalSide * kCanonicalSide;

/// Decodes binary PPM (P6) or PGM (P5) with maxval 255, and PNG when built
/// with libpng. Throws MalformedImage or UnsupportedFormat.
RgbRaster decode_frame(std::span<const std::uint8_t> bytes);
RgbRaster read_frame(const std::filesystem::path& path);

/// True when the build can decode PNG files.
bool png_supported() noexcept;

std::vector<std::uint8_t> encode_ppm(const RgbRaster& img);
std::vector<std::uint8_t> encode_pgm(const GrayRaster& img);

/// Luminance with weights 0.299/0.587/0.114 on r/g/b, rounded half-up.
GrayRaster to_gray(const RgbRaster& img);

/// Nearest-neighbour resample: output (x, y) reads input (x*W/w, y*H/h).
GrayRaster rescale(const GrayRaster& img, int width, int height);

GrayHistogram gray_histogram(const GrayRaster& img);

}  // namespace clipseek
