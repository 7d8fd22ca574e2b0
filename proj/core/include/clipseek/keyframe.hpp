#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clipseek/raster.hpp"

namespace clipseek {

inline constexpr double kDefaultKeyframeThreshold = 800.0;

/// One frame of a video. `thumb` is the canonical 30x30 gray rescale; the
/// full-resolution pixels are either held in memory or re-read from `path`.
struct Frame {
  std::string name;
  std::filesystem::path path;
  GrayRaster thumb;
  std::optional<RgbRaster> pixels;
};

struct FrameSeq {
  std::vector<Frame> frames;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
};

struct SkippedFrame {
  std::string file;
  std::string reason;
};

struct IngestReport {
  std::size_t considered = 0;
  std::vector<SkippedFrame> skipped;
};

struct KeyframeSelection {
  std::vector<std::size_t> indices;
  double threshold_used = kDefaultKeyframeThreshold;
};

/// Builds the canonical thumbnail for a decoded frame.
GrayRaster canonical_thumb(const RgbRaster& img);

/// Wraps an in-memory raster as a frame; the pixels stay resident.
Frame make_frame(std::string name, RgbRaster pixels);

/// Full-resolution pixels of a frame, decoding from disk when not resident.
RgbRaster load_pixels(const Frame& frame);

/// True for extensions the decoder may understand (.ppm .pgm .pnm, .png).
bool is_frame_file(const std::filesystem::path& path);

/// Reads every supported image in `dir` in lexicographic name order.
/// Undecodable files are skipped and listed in `report`.
FrameSeq ingest_frames(const std::filesystem::path& dir, IngestReport* report = nullptr,
                       bool keep_pixels = false);

/// Sum of absolute gray differences. Both rasters must share dimensions.
double frame_distance(const GrayRaster& a, const GrayRaster& b);

using PairDistance = std::function<double(std::size_t, std::size_t)>;

/// Run-collapsing keyframe scan over `count` frames. Frame i opens a run;
/// following frames j stay in the run while distance(i, j) <= threshold.
/// The first frame beyond the threshold opens the next run.
KeyframeSelection extract_keyframes(std::size_t count, const PairDistance& distance,
                                    double threshold = kDefaultKeyframeThreshold);

KeyframeSelection extract_keyframes(const FrameSeq& seq,
                                    double threshold = kDefaultKeyframeThreshold);

}  // namespace clipseek
