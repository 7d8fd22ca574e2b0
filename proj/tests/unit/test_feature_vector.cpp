#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clipseek/corpus.hpp"
#include "clipseek/feature_vector.hpp"
#include "support.hpp"

using namespace clipseek;
using namespace clipseek::testing;

namespace {

FeatureVector random_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  FeatureVector v;
  for (double& x : v.values) x = u(rng);
  return v;
}

double oracle_distance(const FeatureVector& a, const FeatureVector& b) {
  long double sum = 0;
  for (std::size_t i = 0; i < kFeatureDims; ++i) {
    const long double d = static_cast<long double>(a.values[i]) - b.values[i];
    sum += d * d;
  }
  return static_cast<double>(std::sqrt(sum));
}

}  // namespace

TEST(Scaling, SingleKeyframeIsDegenerate) {
  std::mt19937_64 rng(1);
  const auto f = featurize(random_rgb(rng, 20, 20));
  const auto scale = compute_scaling(std::span(&f, 1));
  const auto v = build_vector(f, scale);
  for (std::size_t i = 0; i < kGlcmFeatureCount; ++i) EXPECT_EQ(v.values[kGlcmOffset + i], 0.0);
  EXPECT_EQ(v.values[kRegionOffset], f.major_regions > 0 ? 1.0 : 0.0);
  EXPECT_EQ(scale.samples, 1u);
}

TEST(Scaling, AllBlackHistogram) {
  const auto f = featurize(RgbRaster(10, 10));
  const auto v = build_vector(f, compute_scaling(std::span(&f, 1)));
  EXPECT_EQ(v.values[0], 1.0);
  for (std::size_t i = 1; i < 64; ++i) EXPECT_EQ(v.values[i], 0.0);
}

TEST(Scaling, EntropyZeroAndLnTwo) {
  const auto flat = featurize(gray_to_rgb(GrayRaster(4, 3, 9)));
  // Alternating columns: every horizontal pair is (0, 255) or (255, 0).
  GrayRaster stripes(4, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 1; x < 4; x += 2) stripes.at(x, y) = 255;
  }
  const auto pair = featurize(gray_to_rgb(stripes));
  ASSERT_EQ(flat.glcm.entropy, 0.0);
  ASSERT_NEAR(pair.glcm.entropy, std::log(2.0), 1e-15);
  const std::vector<KeyframeFeatures> corpus = {flat, pair};
  const auto scale = compute_scaling(corpus);
  EXPECT_EQ(build_vector(flat, scale).values[kGlcmOffset + 4], 0.0);
  EXPECT_EQ(build_vector(pair, scale).values[kGlcmOffset + 4], 1.0);
}

TEST(Scaling, MatchesMinMaxOracle) {
  std::mt19937_64 rng(5);
  std::vector<KeyframeFeatures> corpus;
  for (int i = 0; i < 25; ++i) {
    corpus.push_back(featurize(corpus::random_video(rng(), 24 + i, 1).frames[0]));
  }
  const auto scale = compute_scaling(corpus);
  int max_regions = 0;
  for (const auto& f : corpus) max_regions = std::max(max_regions, f.major_regions);
  ASSERT_GT(max_regions, 0);
  EXPECT_EQ(scale.regions_max, max_regions);
  for (const auto& f : corpus) {
    const auto v = build_vector(f, scale);
    const auto comps = glcm_components(f.glcm);
    for (std::size_t c = 0; c < kGlcmFeatureCount; ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& g : corpus) {
        lo = std::min(lo, glcm_components(g.glcm)[c]);
        hi = std::max(hi, glcm_components(g.glcm)[c]);
      }
      const double want = hi == lo ? 0.0 : (comps[c] - lo) / (hi - lo);
      EXPECT_NEAR(v.values[kGlcmOffset + c], want, 1e-12);
      EXPECT_GE(v.values[kGlcmOffset + c], 0.0);
      EXPECT_LE(v.values[kGlcmOffset + c], 1.0);
    }
    double hist_sum = 0;
    for (std::size_t i = 0; i < 64; ++i) hist_sum += v.values[i];
    EXPECT_NEAR(hist_sum, 1.0, 1e-12);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(v.values[kEdgeOffset + i], f.edges[i]);
    EXPECT_EQ(v.values[kRegionOffset], double(f.major_regions) / max_regions);
  }
}

TEST(Scaling, ComponentOrder) {
  GlcmFeatures g;
  g.angular_second_moment = 1;
  g.contrast = 2;
  g.correlation = 3;
  g.idm = 4;
  g.entropy = 5;
  EXPECT_EQ(glcm_components(g), (std::array<double, 5>{1, 2, 3, 4, 5}));
}

TEST(Distance, Examples) {
  FeatureVector a, b;
  EXPECT_EQ(euclidean_distance(a, a), 0.0);
  b.values[3] = 3;
  b.values[70] = 4;
  EXPECT_EQ(euclidean_distance(a, b), 5.0);
}

TEST(Distance, MatchesOracleAndMetricAxioms) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_vector(rng);
    const auto b = random_vector(rng);
    const auto c = random_vector(rng);
    const double ab = euclidean_distance(a, b);
    EXPECT_NEAR(ab, oracle_distance(a, b), 1e-12);
    EXPECT_EQ(ab, euclidean_distance(b, a));
    EXPECT_EQ(euclidean_distance(a, a), 0.0);
    EXPECT_LE(ab, euclidean_distance(a, c) + euclidean_distance(c, b) + 1e-12);
  }
}

TEST(Distance, LengthMismatch) {
  const std::vector<double> a(3), b(4);
  EXPECT_EQ(error_code_of([&] { euclidean_distance(a, b); }), Errc::DimensionMismatch);
}

TEST(Distance, WeightedReducesToPlainWhenUniform) {
  std::mt19937_64 rng(13);
  const auto a = random_vector(rng);
  const auto b = random_vector(rng);
  EXPECT_NEAR(weighted_distance(a, b, {}), euclidean_distance(a, b), 1e-12);
  BlockWeights w;
  w.histogram = 0;
  w.glcm = 0;
  w.edges = 0;
  w.regions = 4;
  EXPECT_NEAR(weighted_distance(a, b, w), 2 * std::abs(a.values[kRegionOffset] - b.values[kRegionOffset]), 1e-12);
}
