#include "clipseek/raster.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "clipseek/error.hpp"

#ifdef CLIPSEEK_HAVE_PNG
#include <png.h>
#endif

namespace clipseek {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(Errc::InvalidArgument, "raster dimensions must be positive");
  }
}

// Cursor over a PNM header. Whitespace and '#' comments separate tokens.
class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int next_int() {
    skip_separators();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(Errc::MalformedImage, "PNM header: expected integer");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) {
        fail(Errc::MalformedImage, "PNM header: value out of range");
      }
      ++pos_;
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(Errc::MalformedImage, "PNM header: missing separator before payload");
    }
    return pos_ + 1;
  }

 private:
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

RgbRaster decode_pnm(std::span<const std::uint8_t> bytes, bool color) {
  PnmHeader header(bytes);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  if (width < 1 || height < 1) {
    fail(Errc::MalformedImage, "PNM header: zero dimension");
  }
  if (maxval != 255) {
    fail(Errc::UnsupportedFormat, "only maxval 255 is supported");
  }
  const std::size_t offset = header.payload_offset();
  const std::size_t channels = color ? 3 : 1;
  const std::size_t expected =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (bytes.size() < offset + expected) {
    fail(Errc::MalformedImage, "PNM payload truncated: expected " +
                                   std::to_string(expected) + " bytes, got " +
                                   std::to_string(bytes.size() - std::min(bytes.size(), offset)));
  }

  RgbRaster out(width, height);
  auto dst = out.pixels();
  const std::uint8_t* src = bytes.data() + offset;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (color) {
      dst[i] = Rgb{src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    } else {
      dst[i] = Rgb{src[i], src[i], src[i]};
    }
  }
  return out;
}

#ifdef CLIPSEEK_HAVE_PNG
RgbRaster decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(Errc::MalformedImage, std::string("PNG: ") + image.message);
  }
  // Palette and gray images expand to RGB here.
  image.format = PNG_FORMAT_RGB;
  if (image.width < 1 || image.height < 1 || image.width > 1u << 15 || image.height > 1u << 15) {
    png_image_free(&image);
    fail(Errc::MalformedImage, "PNG: unsupported dimensions");
  }
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    fail(Errc::MalformedImage, "PNG: " + message);
  }
  RgbRaster out(static_cast<int>(image.width), static_cast<int>(image.height));
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return out;
}
#endif

}  // namespace

RgbRaster::RgbRaster(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RgbRaster::RgbRaster(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(Errc::DimensionMismatch, "pixel count does not match width x height");
  }
}

GrayRaster::GrayRaster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayRaster::GrayRaster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(Errc::DimensionMismatch, "pixel count does not match width x height");
  }
}

std::uint64_t GrayHistogram::total() const noexcept {
  return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

bool png_supported() noexcept {
#ifdef CLIPSEEK_HAVE_PNG
  return true;
#else
  return false;
#endif
}

RgbRaster decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) {
    fail(Errc::MalformedImage, "image too short to carry a signature");
  }
  if (bytes[0] == 'P' && bytes[1] == '6') return decode_pnm(bytes, true);
  if (bytes[0] == 'P' && bytes[1] == '5') return decode_pnm(bytes, false);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
      bytes[3] == 'G') {
#ifdef CLIPSEEK_HAVE_PNG
    return decode_png(bytes);
#else
    fail(Errc::UnsupportedFormat, "PNG support not compiled in");
#endif
  }
  if (bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') {
    fail(Errc::UnsupportedFormat, "only binary P5/P6 netpbm variants are supported");
  }
  fail(Errc::UnsupportedFormat, "unrecognised image signature");
}

RgbRaster read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_frame(bytes);
}

std::vector<std::uint8_t> encode_ppm(const RgbRaster& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm(const GrayRaster& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayRaster to_gray(const RgbRaster& img) {
  GrayRaster out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    // Weights scaled by 1000; +500 gives round-half-up. Max is 255500/1000.
    const std::uint32_t y = 299u * src[i].r + 587u * src[i].g + 114u * src[i].b + 500u;
    dst[i] = static_cast<std::uint8_t>(std::min<std::uint32_t>(y / 1000u, 255u));
  }
  return out;
}

GrayRaster rescale(const GrayRaster& img, int width, int height) {
  if (width < 1 || height < 1) {
    fail(Errc::InvalidArgument, "rescale target must be at least 1x1");
  }
  GrayRaster out(width, height);
  const auto src_w = static_cast<std::int64_t>(img.width());
  const auto src_h = static_cast<std::int64_t>(img.height());
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(y * src_h / height);
    for (int x = 0; x < width; ++x) {
      const int sx = static_cast<int>(x * src_w / width);
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

GrayHistogram gray_histogram(const GrayRaster& img) {
  GrayHistogram hist;
  for (std::uint8_t v : img.pixels()) ++hist.bins[v];
  return hist;
}

}  // namespace clipseek
