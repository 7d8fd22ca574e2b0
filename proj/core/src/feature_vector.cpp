#include "clipseek/feature_vector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clipseek/error.hpp"

namespace clipseek {

std::array<double, kGlcmFeatureCount> glcm_components(const GlcmFeatures& g) {
  return {g.angular_second_moment, g.contrast, g.correlation, g.idm, g.entropy};
}

ScalingStats compute_scaling(std::span<const KeyframeFeatures> corpus) {
  ScalingStats s;
  s.samples = corpus.size();
  if (corpus.empty()) return s;
  s.glcm_min = glcm_components(corpus.front().glcm);
  s.glcm_max = s.glcm_min;
  for (const KeyframeFeatures& f : corpus) {
    const auto c = glcm_components(f.glcm);
    for (std::size_t i = 0; i < c.size(); ++i) {
      s.glcm_min[i] = std::min(s.glcm_min[i], c[i]);
      s.glcm_max[i] = std::max(s.glcm_max[i], c[i]);
    }
    s.regions_max = std::max(s.regions_max, f.major_regions);
  }
  return s;
}

FeatureVector build_vector(const KeyframeFeatures& f, const ScalingStats& scale) {
  FeatureVector v;
  const std::uint64_t pixels =
      std::accumulate(f.sch.begin(), f.sch.end(), std::uint64_t{0});
  if (pixels > 0) {
    for (std::size_t i = 0; i < f.sch.size(); ++i) {
      v.values[kHistogramOffset + i] = static_cast<double>(f.sch[i]) / static_cast<double>(pixels);
    }
  }

  const auto c = glcm_components(f.glcm);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double range = scale.glcm_max[i] - scale.glcm_min[i];
    v.values[kGlcmOffset + i] = range > 0.0 ? (c[i] - scale.glcm_min[i]) / range : 0.0;
  }

  std::copy(f.edges.begin(), f.edges.end(), v.values.begin() + kEdgeOffset);

  v.values[kRegionOffset] =
      scale.regions_max > 0 ? static_cast<double>(f.major_regions) / scale.regions_max : 0.0;
  return v;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(Errc::DimensionMismatch, "feature vectors differ in dimension (" +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double euclidean_distance(const FeatureVector& a, const FeatureVector& b) {
  return euclidean_distance(std::span<const double>(a.values), std::span<const double>(b.values));
}

double weighted_distance(const FeatureVector& a, const FeatureVector& b, const BlockWeights& w) {
  if (w.uniform()) return euclidean_distance(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureDims; ++i) {
    double weight = w.histogram;
    if (i >= kRegionOffset) {
      weight = w.regions;
    } else if (i >= kEdgeOffset) {
      weight = w.edges;
    } else if (i >= kGlcmOffset) {
      weight = w.glcm;
    }
    const double d = a.values[i] - b.values[i];
    sum += weight * d * d;
  }
  return std::sqrt(sum);
}

}  // namespace clipseek
