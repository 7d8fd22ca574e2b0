#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "clipseek/features.hpp"

namespace clipseek {

// Layout: 64 normalised histogram bins, 5 scaled GLCM features (asm,
// contrast, correlation, idm, entropy), 16 edge densities, 1 scaled region
// count.
inline constexpr std::size_t kHistogramOffset = 0;
inline constexpr std::size_t kGlcmOffset = 64;
inline constexpr std::size_t kEdgeOffset = 69;
inline constexpr std::size_t kRegionOffset = 85;
inline constexpr std::size_t kFeatureDims = 86;
inline constexpr std::size_t kGlcmFeatureCount = 5;

struct FeatureVector {
  std::array<double, kFeatureDims> values{};

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Corpus-wide ranges used to bring GLCM features and region counts to a
/// comparable scale.
struct ScalingStats {
  std::array<double, kGlcmFeatureCount> glcm_min{};
  std::array<double, kGlcmFeatureCount> glcm_max{};
  int regions_max = 0;
  std::size_t samples = 0;

  friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

std::array<double, kGlcmFeatureCount> glcm_components(const GlcmFeatures& g);

ScalingStats compute_scaling(std::span<const KeyframeFeatures> corpus);

/// Histogram bins over the pixel count, GLCM features min-max scaled (a
/// degenerate range maps to 0), edge densities as-is, regions over the
/// corpus maximum (0 when that maximum is 0).
FeatureVector build_vector(const KeyframeFeatures& f, const ScalingStats& scale);

/// Throws DimensionMismatch when lengths differ.
double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(const FeatureVector& a, const FeatureVector& b);

/// Per-block multipliers on the squared differences.
struct BlockWeights {
  double histogram = 1.0;
  double glcm = 1.0;
  double edges = 1.0;
  double regions = 1.0;

  bool uniform() const noexcept {
    return histogram == 1.0 && glcm == 1.0 && edges == 1.0 && regions == 1.0;
  }
};

double weighted_distance(const FeatureVector& a, const FeatureVector& b, const BlockWeights& w);

}  // namespace clipseek
