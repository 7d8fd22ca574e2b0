#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "clipseek/keyframe.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/raster.hpp"

// Deterministic synthetic videos for tests, benchmarks and demos.
namespace clipseek::corpus {

struct SyntheticVideo {
  std::string name;
  std::vector<RgbRaster> frames;
};

/// Class colours sit in the middle of their quantisation bins. Per-video
/// brightness jitter of up to kClassJitter keeps each class inside its joint
/// histogram bin and its deepest gray range bucket (luminance 89, 145, 54,
/// 202 against bucket edges at multiples of 32).
inline constexpr std::array<Rgb, 4> kClassColors = {{
    {224, 32, 32},
    {32, 224, 32},
    {32, 32, 224},
    {224, 224, 32},
}};
inline constexpr int kClassJitter = 4;
inline constexpr std::array<const char*, 4> kClassNames = {"red", "green", "blue", "yellow"};

/// Class-coloured background with a dark square wandering over it.
SyntheticVideo color_class_video(std::size_t class_index, std::uint64_t seed, int side = 48,
                                 int frames = 6);

/// Random blocky texture with a random palette; distinct seeds give distinct
/// feature vectors.
SyntheticVideo random_video(std::uint64_t seed, int side = 48, int frames = 6);

enum class Direction { LeftToRight, RightToLeft, TopToBottom, BottomToTop, Diagonal };

inline constexpr std::array<Direction, 5> kAllDirections = {
    Direction::LeftToRight, Direction::RightToLeft, Direction::TopToBottom,
    Direction::BottomToTop, Direction::Diagonal};

const char* direction_name(Direction d);

inline constexpr int kSquareSide = 60;
inline constexpr int kSquareSize = 12;
inline constexpr int kSquareStep = 6;

/// White square crossing a gray field in `kSquareStep` pixel steps.
SyntheticVideo moving_square(Direction d);

/// Normalised straight stroke along `d`.
Trajectory direction_sketch(Direction d);

FrameSeq to_frame_seq(const SyntheticVideo& video);

/// Writes f000.ppm, f001.ppm, ... into `dir`, creating it.
void write_frames(const SyntheticVideo& video, const std::filesystem::path& dir);

}  // namespace clipseek::corpus
