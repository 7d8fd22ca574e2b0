#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "clipseek/catalog.hpp"
#include "clipseek/corpus.hpp"
#include "clipseek/features.hpp"
#include "clipseek/keyframe.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/range_index.hpp"
#include "clipseek/retrieval.hpp"

using namespace clipseek;

namespace {

RgbRaster noise(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbRaster img(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      img.at(x, y) = {std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
    }
  }
  return img;
}

}  // namespace

static void BM_Glcm(benchmark::State& state) {
  const auto gray = to_gray(noise(static_cast<int>(state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(glcm_features(gray));
}
BENCHMARK(BM_Glcm)->Arg(30)->Arg(120)->Arg(352);

static void BM_Featurize(benchmark::State& state) {
  const auto img = noise(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(featurize(img));
}
BENCHMARK(BM_Featurize)->Arg(48)->Arg(176)->Arg(352);

static void BM_AssignBucket(benchmark::State& state) {
  const auto hist = gray_histogram(canonical_thumb(noise(64, 3)));
  for (auto _ : state) benchmark::DoNotOptimize(assign_bucket(hist));
}
BENCHMARK(BM_AssignBucket);

static void BM_KeyframeScan(benchmark::State& state) {
  const auto seq = corpus::to_frame_seq(corpus::random_video(4, 48, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(extract_keyframes(seq));
}
BENCHMARK(BM_KeyframeScan)->Arg(30)->Arg(300);

static void BM_GradientCorrelation(benchmark::State& state) {
  const auto a = trajectory_gradients(corpus::direction_sketch(corpus::Direction::Diagonal));
  const auto b = trajectory_gradients(corpus::direction_sketch(corpus::Direction::LeftToRight));
  for (auto _ : state) benchmark::DoNotOptimize(gradient_correlation(a, b));
}
BENCHMARK(BM_GradientCorrelation);

// Indexed versus exhaustive search over a catalog of state.range(0) videos.
static void BM_Search(benchmark::State& state) {
  const auto root = std::filesystem::temp_directory_path() /
                    ("clipseek-bench-" + std::to_string(state.range(0)) + "-" + std::to_string(state.range(1)));
  std::filesystem::remove_all(root);
  {
    Catalog catalog(root);
    for (std::int64_t s = 0; s < state.range(0); ++s) {
      catalog.register_video("b" + std::to_string(s), corpus::to_frame_seq(corpus::random_video(100 + s)));
    }
    const auto snap = catalog.snapshot();
    SearchOptions opt;
    const auto prepared = prepare_query(corpus::to_frame_seq(corpus::random_video(7)), opt);
    const bool exhaustive = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(rank_videos(*snap, prepared, opt, exhaustive));
  }
  std::filesystem::remove_all(root);
}
BENCHMARK(BM_Search)->ArgsProduct({{25, 100}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
