#include "clipseek/keyframe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "clipseek/error.hpp"

namespace clipseek {

namespace fs = std::filesystem;

GrayRaster canonical_thumb(const RgbRaster& img) {
  return rescale(to_gray(img), kCanonicalSide, kCanonicalSide);
}

Frame make_frame(std::string name, RgbRaster pixels) {
  Frame frame;
  frame.name = std::move(name);
  frame.thumb = canonical_thumb(pixels);
  frame.pixels = std::move(pixels);
  return frame;
}

RgbRaster load_pixels(const Frame& frame) {
  if (frame.pixels) return *frame.pixels;
  return read_frame(frame.path);
}

bool is_frame_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return true;
  return ext == ".png" && png_supported();
}

FrameSeq ingest_frames(const fs::path& dir, IngestReport* report, bool keep_pixels) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    fail(Errc::EmptyDirectory, "not a frame directory: " + dir.string());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.filename().string().starts_with('.')) continue;
    if (is_frame_file(p)) files.push_back(p);
  }
  if (files.empty()) {
    fail(Errc::EmptyDirectory, "no supported frame files in " + dir.string());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  IngestReport local;
  IngestReport& rep = report ? *report : local;
  rep.considered = files.size();

  FrameSeq seq;
  seq.frames.reserve(files.size());
  for (const auto& p : files) {
    try {
      RgbRaster img = read_frame(p);
      Frame frame;
      frame.name = p.filename().string();
      frame.path = p;
      frame.thumb = canonical_thumb(img);
      if (keep_pixels) frame.pixels = std::move(img);
      seq.frames.push_back(std::move(frame));
    } catch (const Error& e) {
      rep.skipped.push_back({p.filename().string(), e.what()});
    }
  }
  if (seq.empty()) {
    fail(Errc::NoDecodableFrames, "no decodable frames in " + dir.string());
  }
  return seq;
}

double frame_distance(const GrayRaster& a, const GrayRaster& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(Errc::DimensionMismatch, "frame_distance: raster sizes differ");
  }
  std::uint64_t sum = 0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    sum += static_cast<std::uint64_t>(std::abs(int{pa[i]} - int{pb[i]}));
  }
  return static_cast<double>(sum);
}

KeyframeSelection extract_keyframes(std::size_t count, const PairDistance& distance,
                                    double threshold) {
  if (count == 0) fail(Errc::EmptySequence, "cannot extract keyframes from an empty sequence");
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    fail(Errc::InvalidArgument, "keyframe threshold must be finite and non-negative");
  }

  KeyframeSelection sel;
  sel.threshold_used = threshold;
  std::size_t i = 0;
  while (i < count) {
    sel.indices.push_back(i);
    std::size_t j = i + 1;
    while (j < count && distance(i, j) <= threshold) ++j;
    i = j;
  }
  return sel;
}

KeyframeSelection extract_keyframes(const FrameSeq& seq, double threshold) {
  return extract_keyframes(
      seq.size(),
      [&seq](std::size_t i, std::size_t j) {
        return frame_distance(seq.frames[i].thumb, seq.frames[j].thumb);
      },
      threshold);
}

}  // namespace clipseek
