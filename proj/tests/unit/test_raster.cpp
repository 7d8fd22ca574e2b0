#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <string>

#include "clipseek/error.hpp"
#include "clipseek/raster.hpp"
#include "support.hpp"

using namespace clipseek;
using namespace clipseek::testing;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no clipseek::Error thrown";
  return Errc::Io;
}

}  // namespace

TEST(Decode, P6AllBlack) {
  const auto img = decode_frame(bytes_of("P6 2 2 255\n", std::vector<std::uint8_t>(12, 0)));
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  for (const Rgb& p : img.pixels()) EXPECT_EQ(p, (Rgb{0, 0, 0}));
}

TEST(Decode, P5ReplicatesGray) {
  const auto img = decode_frame(bytes_of("P5 1 1 255\n", {0x7F}));
  ASSERT_EQ(img.size(), 1u);
  EXPECT_EQ(img.at(0, 0), (Rgb{127, 127, 127}));
}

TEST(Decode, TruncatedPayloadIsMalformed) {
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("P6 2 2 255\n", std::vector<std::uint8_t>(11, 0))); }),
            Errc::MalformedImage);
}

TEST(Decode, HeaderCommentsAreSkipped) {
  const auto img = decode_frame(bytes_of("P5\n# a comment\n2 1\n255\n", {1, 2}));
  EXPECT_EQ(img.at(1, 0), (Rgb{2, 2, 2}));
}

TEST(Decode, UnsupportedFormats) {
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("P3 1 1 255\n0 0 0\n", {})); }), Errc::UnsupportedFormat);
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("GIF89a", {0, 0, 0, 0})); }), Errc::UnsupportedFormat);
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("P5 1 1 65535\n", {0, 0})); }), Errc::UnsupportedFormat);
}

TEST(Decode, GarbageHeaderIsMalformed) {
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("P6 x 2 255\n", {})); }), Errc::MalformedImage);
  EXPECT_EQ(error_of([] { decode_frame(bytes_of("P6 0 2 255\n", {})); }), Errc::MalformedImage);
}

TEST(Decode, RoundTripP6AndP5) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto rgb = random_rgb(rng, 1 + static_cast<int>(rng() % 17), 1 + static_cast<int>(rng() % 9));
    EXPECT_EQ(decode_frame(encode_ppm(rgb)), rgb);
    const auto gray = random_gray(rng, 1 + static_cast<int>(rng() % 13), 1 + static_cast<int>(rng() % 7));
    EXPECT_EQ(decode_frame(encode_pgm(gray)), gray_to_rgb(gray));
  }
}

TEST(Decode, PngWhenAvailable) {
  if (!png_supported()) GTEST_SKIP() << "built without libpng";
  // 2x1 RGB PNG: (255, 0, 0), (0, 128, 255).
  const std::vector<std::uint8_t> png = {
      0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49, 0x48, 0x44,
      0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x7B,
      0x40, 0xE8, 0xDD, 0x00, 0x00, 0x00, 0x0F, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9C, 0x63, 0xF8,
      0xCF, 0xC0, 0xC0, 0xD0, 0xF0, 0x1F, 0x00, 0x08, 0x00, 0x02, 0x7F, 0x9C, 0x45, 0x40, 0x4E,
      0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82};
  const auto img = decode_frame(png);
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 1);
  EXPECT_EQ(img.at(0, 0), (Rgb{255, 0, 0}));
  EXPECT_EQ(img.at(1, 0), (Rgb{0, 128, 255}));
}

TEST(Gray, KnownValues) {
  RgbRaster img(3, 1);
  img.at(0, 0) = {255, 255, 255};
  img.at(1, 0) = {0, 0, 0};
  img.at(2, 0) = {255, 0, 0};
  const auto g = to_gray(img);
  EXPECT_EQ(g.at(0, 0), 255);
  EXPECT_EQ(g.at(1, 0), 0);
  EXPECT_EQ(g.at(2, 0), 76);  // 0.299 * 255 = 76.245
}

TEST(Gray, MatchesRoundedLuminanceOracle) {
  std::mt19937_64 rng(3);
  const auto img = random_rgb(rng, 64, 64);
  const auto g = to_gray(img);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const Rgb p = img.at(x, y);
      const double lum = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
      // Exact half-up: compare in thousandths to dodge binary representation.
      const long thousandths = 299L * p.r + 587L * p.g + 114L * p.b;
      const long expected = (thousandths + 500) / 1000;
      ASSERT_EQ(g.at(x, y), expected) << "lum " << lum;
    }
  }
}

TEST(Gray, IdempotentOnGray) {
  for (int v = 0; v < 256; ++v) {
    const auto b = static_cast<std::uint8_t>(v);
    EXPECT_EQ(to_gray(RgbRaster(1, 1, {b, b, b})).at(0, 0), v);
  }
}

TEST(Rescale, ConstantStaysConstant) {
  EXPECT_EQ(rescale(GrayRaster(4, 4, 128), 2, 2), GrayRaster(2, 2, 128));
}

TEST(Rescale, SameSizeIsIdentity) {
  std::mt19937_64 rng(5);
  const auto g = random_gray(rng, 17, 23);
  EXPECT_EQ(rescale(g, 17, 23), g);
}

TEST(Rescale, NearestNeighbourUpscale) {
  const GrayRaster src(2, 2, {0, 255, 0, 255});
  const auto out = rescale(src, 4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(out.at(x, y), x < 2 ? 0 : 255);
  }
}

TEST(Rescale, IndexFormula) {
  std::mt19937_64 rng(9);
  const auto src = random_gray(rng, 47, 31);
  const auto out = rescale(src, 30, 30);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) EXPECT_EQ(out.at(x, y), src.at(x * 47 / 30, y * 31 / 30));
  }
}

TEST(Histogram, SingleValueAndEnumeration) {
  const auto h = gray_histogram(GrayRaster(2, 2, 0));
  EXPECT_EQ(h.bins[0], 4u);
  EXPECT_EQ(h.total(), 4u);
  const auto h2 = gray_histogram(GrayRaster(1, 2, {0, 255}));
  EXPECT_EQ(h2.bins[0], 1u);
  EXPECT_EQ(h2.bins[255], 1u);
  EXPECT_EQ(h2.total(), 2u);
}

TEST(Histogram, SumsToPixelCount) {
  std::mt19937_64 rng(21);
  for (int seed = 0; seed < 50; ++seed) {
    const auto g = random_gray(rng, 30, 30);
    const auto h = gray_histogram(g);
    EXPECT_EQ(std::accumulate(h.bins.begin(), h.bins.end(), std::uint64_t{0}), 900u);
  }
}
