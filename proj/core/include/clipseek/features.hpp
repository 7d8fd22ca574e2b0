#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clipseek/raster.hpp"

namespace clipseek {

// Column capacities of the keyframe record.
inline constexpr std::size_t kSchCapacity = 1500;
inline constexpr std::size_t kEdgeCapacity = 250;
inline constexpr std::size_t kGlcmCapacity = 250;

inline constexpr int kSchBins = 64;
inline constexpr int kGrayLevels = 256;
inline constexpr int kEdgeGrid = 4;
inline constexpr int kEdgeBlocks = kEdgeGrid * kEdgeGrid;

using JointHistogram = std::array<std::uint32_t, kSchBins>;
using EdgeDensities = std::array<double, kEdgeBlocks>;

// ---------------------------------------------------------------------------
// Color histogram

struct ColorHistogram {
  /// 4x4x4 uniform RGB quantisation; this is what gets persisted (SCH).
  JointHistogram joint{};
  /// Full-resolution marginals h_r, h_g, h_b.
  std::array<std::array<std::uint32_t, 256>, 3> channels{};

  friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

/// 16 * (r / 64) + 4 * (g / 64) + b / 64.
constexpr int quantize_rgb(Rgb p) noexcept {
  return 16 * (p.r >> 6) + 4 * (p.g >> 6) + (p.b >> 6);
}

ColorHistogram color_histogram(const RgbRaster& img);

// ---------------------------------------------------------------------------
// Gray-level co-occurrence texture

enum class CorrelationMode {
  /// Covariance divided by the product of the two variance accumulators.
  Literal,
  /// Covariance divided by sqrt(var_x * var_y), the textbook Haralick form.
  Haralick,
};

struct GlcmFeatures {
  std::uint64_t pixel_counter = 0;
  double angular_second_moment = 0.0;
  double contrast = 0.0;
  double correlation = 0.0;
  double idm = 0.0;
  double entropy = 0.0;
  int step = 1;

  friend bool operator==(const GlcmFeatures&, const GlcmFeatures&) = default;
};

/// Symmetric 256x256 co-occurrence counts for horizontal displacement `step`.
class GlcmMatrix {
 public:
  GlcmMatrix() : counts_(static_cast<std::size_t>(kGrayLevels) * kGrayLevels, 0) {}

  std::uint64_t count(int a, int b) const { return counts_[index(a, b)]; }
  std::uint64_t pixel_counter() const noexcept { return pixel_counter_; }
  int step() const noexcept { return step_; }

  /// Normalised entry count(a, b) / pixel_counter.
  double probability(int a, int b) const {
    return static_cast<double>(count(a, b)) / static_cast<double>(pixel_counter_);
  }

 private:
  friend GlcmMatrix glcm_matrix(const GrayRaster&, int);
  static std::size_t index(int a, int b) {
    return static_cast<std::size_t>(a) * kGrayLevels + static_cast<std::size_t>(b);
  }

  std::vector<std::uint64_t> counts_;
  std::uint64_t pixel_counter_ = 0;
  int step_ = 1;
};

/// Every pixel (x, y) with x + step < width contributes (a, b) and (b, a).
/// Throws TooNarrow when width <= step.
GlcmMatrix glcm_matrix(const GrayRaster& img, int step = 1);

GlcmFeatures glcm_features(const GlcmMatrix& glcm,
                           CorrelationMode mode = CorrelationMode::Literal);
GlcmFeatures glcm_features(const GrayRaster& img, int step = 1,
                           CorrelationMode mode = CorrelationMode::Literal);

// ---------------------------------------------------------------------------
// Edge density and major regions

inline constexpr int kDefaultEdgeThreshold = 128;
inline constexpr double kDefaultMajorRegionFraction = 0.05;

/// Per-block fraction of Sobel edge pixels (|Gx| + |Gy| >= threshold) on a
/// 4x4 grid, row-major. Border pixels never count as edges. Blocks are
/// width/4 by height/4; the last row and column absorb the remainder.
/// Values are rounded half-up to a resolution of 1e-6 so the serialised
/// column stays bounded. Throws TooSmall below 3x3.
EdgeDensities edge_density(const GrayRaster& img, int threshold = kDefaultEdgeThreshold);

/// Number of 4-connected components of equal joint color bin whose area is
/// at least `min_fraction` of the image.
int major_regions(const RgbRaster& img, double min_fraction = kDefaultMajorRegionFraction);

// ---------------------------------------------------------------------------
// Column strings

std::string serialize_histogram(const JointHistogram& sch);
std::string serialize_histogram(const ColorHistogram& hist);
JointHistogram parse_histogram(std::string_view text);

std::string serialize_glcm(const GlcmFeatures& glcm);
/// The step is not part of the column string; callers supply it.
GlcmFeatures parse_glcm(std::string_view text, int step = 1);

std::string serialize_edges(const EdgeDensities& edges);
EdgeDensities parse_edges(std::string_view text);

/// Shortest decimal that parses back to exactly `value`.
std::string format_shortest(double value);

// ---------------------------------------------------------------------------
// Everything one keyframe contributes to the feature store.

struct FeatureConfig {
  int glcm_step = 1;
  CorrelationMode correlation = CorrelationMode::Literal;
  int edge_threshold = kDefaultEdgeThreshold;
  double major_region_fraction = kDefaultMajorRegionFraction;
};

struct KeyframeFeatures {
  JointHistogram sch{};
  GlcmFeatures glcm;
  EdgeDensities edges{};
  int major_regions = 0;

  friend bool operator==(const KeyframeFeatures&, const KeyframeFeatures&) = default;
};

KeyframeFeatures featurize(const RgbRaster& img, const FeatureConfig& config = {});

}  // namespace clipseek
