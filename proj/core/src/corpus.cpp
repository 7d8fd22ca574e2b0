#include "clipseek/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "clipseek/error.hpp"

namespace clipseek::corpus {

namespace {

// Portable draw in [0, n); std distributions differ between standard libraries.
int draw(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

std::uint8_t clamp_byte(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

void fill_rect(RgbRaster& img, int x0, int y0, int size, Rgb color) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y0 + size); ++y) {
    for (int x = std::max(0, x0); x < std::min(img.width(), x0 + size); ++x) img.at(x, y) = color;
  }
}

}  // namespace

SyntheticVideo color_class_video(std::size_t class_index, std::uint64_t seed, int side, int frames) {
  if (class_index >= kClassColors.size()) fail(Errc::InvalidArgument, "unknown colour class");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + class_index);
  const Rgb base = kClassColors[class_index];
  const int jitter = draw(rng, 2 * kClassJitter + 1) - kClassJitter;
  const Rgb bg{clamp_byte(base.r + jitter), clamp_byte(base.g + jitter), clamp_byte(base.b + jitter)};
  const Rgb ink{16, 16, 16};
  const int square = side / 4;
  int x = draw(rng, side - square);
  int y = draw(rng, side - square);
  const int dx = draw(rng, 2) ? 2 : -2;
  const int dy = draw(rng, 2) ? 2 : -2;

  SyntheticVideo v;
  v.name = std::string(kClassNames[class_index]) + "-" + std::to_string(seed);
  for (int f = 0; f < frames; ++f) {
    RgbRaster img(side, side, bg);
    fill_rect(img, x, y, square, ink);
    v.frames.push_back(std::move(img));
    x = std::clamp(x + dx, 0, side - square);
    y = std::clamp(y + dy, 0, side - square);
  }
  return v;
}

SyntheticVideo random_video(std::uint64_t seed, int side, int frames) {
  std::mt19937_64 rng(seed ^ 0xC0FFEEull);
  std::array<Rgb, 4> palette;
  for (Rgb& c : palette) {
    c = {static_cast<std::uint8_t>(draw(rng, 256)), static_cast<std::uint8_t>(draw(rng, 256)),
         static_cast<std::uint8_t>(draw(rng, 256))};
  }
  const int block = 4 + draw(rng, 5);
  RgbRaster base(side, side);
  for (int by = 0; by < side; by += block) {
    for (int bx = 0; bx < side; bx += block) fill_rect(base, bx, by, block, palette[draw(rng, 4)]);
  }

  SyntheticVideo v;
  v.name = "random-" + std::to_string(seed);
  const int shift = 1 + draw(rng, 3);
  for (int f = 0; f < frames; ++f) {
    RgbRaster img(side, side);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) img.at(x, y) = base.at((x + f * shift) % side, y);
    }
    v.frames.push_back(std::move(img));
  }
  return v;
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::LeftToRight: return "left-to-right";
    case Direction::RightToLeft: return "right-to-left";
    case Direction::TopToBottom: return "top-to-bottom";
    case Direction::BottomToTop: return "bottom-to-top";
    case Direction::Diagonal: return "diagonal";
  }
  return "?";
}

SyntheticVideo moving_square(Direction d) {
  const Rgb field{64, 64, 64};
  const Rgb square{255, 255, 255};
  const int mid = (kSquareSide - kSquareSize) / 2;
  const int last = kSquareSide - kSquareSize;
  SyntheticVideo v;
  v.name = std::string("square-") + direction_name(d);
  for (int t = 0; t * kSquareStep <= last; ++t) {
    const int s = t * kSquareStep;
    int x = mid;
    int y = mid;
    switch (d) {
      case Direction::LeftToRight: x = s; break;
      case Direction::RightToLeft: x = last - s; break;
      case Direction::TopToBottom: y = s; break;
      case Direction::BottomToTop: y = last - s; break;
      case Direction::Diagonal: x = s; y = s; break;
    }
    RgbRaster img(kSquareSide, kSquareSide, field);
    fill_rect(img, x, y, kSquareSize, square);
    v.frames.push_back(std::move(img));
  }
  return v;
}

Trajectory direction_sketch(Direction d) {
  Trajectory t;
  t.source = TrajectorySource::Sketch;
  switch (d) {
    case Direction::LeftToRight: t.points = {{0.1, 0.5}, {0.9, 0.5}}; break;
    case Direction::RightToLeft: t.points = {{0.9, 0.5}, {0.1, 0.5}}; break;
    case Direction::TopToBottom: t.points = {{0.5, 0.1}, {0.5, 0.9}}; break;
    case Direction::BottomToTop: t.points = {{0.5, 0.9}, {0.5, 0.1}}; break;
    case Direction::Diagonal: t.points = {{0.1, 0.1}, {0.9, 0.9}}; break;
  }
  return t;
}

FrameSeq to_frame_seq(const SyntheticVideo& video) {
  FrameSeq seq;
  char name[32];
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    std::snprintf(name, sizeof name, "f%03zu.ppm", i);
    seq.frames.push_back(make_frame(name, video.frames[i]));
  }
  return seq;
}

void write_frames(const SyntheticVideo& video, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    std::snprintf(name, sizeof name, "f%03zu.ppm", i);
    const auto bytes = encode_ppm(video.frames[i]);
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) fail(Errc::Io, "cannot write " + (dir / name).string());
  }
}

}  // namespace clipseek::corpus
