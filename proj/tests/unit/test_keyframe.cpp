#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clipseek/error.hpp"
#include "clipseek/keyframe.hpp"
#include "support.hpp"

using namespace clipseek;
using namespace clipseek::testing;

namespace {

KeyframeSelection from_matrix(const std::vector<std::vector<double>>& d, double threshold) {
  return extract_keyframes(d.size(), [&](std::size_t i, std::size_t j) { return d[i][j]; }, threshold);
}

std::vector<std::vector<double>> constant_matrix(std::size_t n, double v) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, v));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  return d;
}

}  // namespace

TEST(FrameDistance, Examples) {
  EXPECT_EQ(frame_distance(GrayRaster(30, 30, 7), GrayRaster(30, 30, 7)), 0.0);
  EXPECT_EQ(frame_distance(GrayRaster(30, 30, 0), GrayRaster(30, 30, 1)), 900.0);
  EXPECT_EQ(frame_distance(GrayRaster(30, 30, 0), GrayRaster(30, 30, 255)), 229500.0);
}

TEST(FrameDistance, MatchesPixelLoopAndIsSymmetric) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_gray(rng, 30, 30);
    const auto b = random_gray(rng, 30, 30);
    double oracle = 0;
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 30; ++x) oracle += std::abs(int(a.at(x, y)) - int(b.at(x, y)));
    }
    EXPECT_EQ(frame_distance(a, b), oracle);
    EXPECT_EQ(frame_distance(a, b), frame_distance(b, a));
    EXPECT_GT(frame_distance(a, b), 0.0);
  }
}

TEST(FrameDistance, DimensionMismatch) {
  try {
    frame_distance(GrayRaster(30, 30), GrayRaster(30, 29));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(Extract, IdenticalFramesCollapse) {
  EXPECT_EQ(from_matrix(constant_matrix(5, 0), 800).indices, (std::vector<std::size_t>{0}));
}

TEST(Extract, NothingCollapses) {
  EXPECT_EQ(from_matrix(constant_matrix(3, 1000), 800).indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Extract, HandTrace) {
  // d(0,1)=100, d(0,2)=900, d(2,3)=50.
  auto d = constant_matrix(4, 5000);
  d[0][1] = d[1][0] = 100;
  d[0][2] = d[2][0] = 900;
  d[2][3] = d[3][2] = 50;
  const auto sel = from_matrix(d, 800);
  EXPECT_EQ(sel.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(sel.threshold_used, 800);
}

TEST(Extract, ComparesAgainstRunOpenerNotPredecessor) {
  // Each step is small but the drift from frame 0 crosses the threshold.
  auto d = constant_matrix(4, 0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) d[i][j] = 500.0 * std::abs(double(i) - double(j));
  }
  EXPECT_EQ(from_matrix(d, 800).indices, (std::vector<std::size_t>{0, 2}));
}

TEST(Extract, SingletonAndEmpty) {
  EXPECT_EQ(from_matrix(constant_matrix(1, 0), 800).indices, (std::vector<std::size_t>{0}));
  try {
    from_matrix({}, 800);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptySequence);
  }
}

TEST(Extract, RejectsNegativeOrNanThreshold) {
  for (double t : {-1.0, std::numeric_limits<double>::quiet_NaN()}) {
    try {
      from_matrix(constant_matrix(2, 0), t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidArgument);
    }
  }
}

TEST(Extract, ZeroThresholdKeepsEveryChange) {
  FrameSeq seq;
  for (int v : {10, 10, 11, 11, 11, 12}) {
    seq.frames.push_back(make_frame("f", RgbRaster(30, 30, {std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)})));
  }
  EXPECT_EQ(extract_keyframes(seq, 0).indices, (std::vector<std::size_t>{0, 2, 5}));
}

TEST(Extract, PropertiesOnRandomMatrices) {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = double(rng() % 1600);
    }
    const auto sel = from_matrix(d, 800);
    ASSERT_EQ(sel.indices, keyframe_oracle(d, 800));
    ASSERT_EQ(sel.indices.front(), 0u);
    // Every dropped frame is within the threshold of the keyframe opening its run.
    std::size_t k = 0;
    for (std::size_t f = 0; f < n; ++f) {
      if (k + 1 < sel.indices.size() && sel.indices[k + 1] == f) ++k;
      if (sel.indices[k] != f) ASSERT_LE(d[sel.indices[k]][f], 800);
    }
    // Consecutive keyframes are beyond the threshold of each other.
    for (std::size_t i = 1; i < sel.indices.size(); ++i) {
      ASSERT_GT(d[sel.indices[i - 1]][sel.indices[i]], 800);
    }
    ASSERT_EQ(from_matrix(d, 800).indices, sel.indices);
  }
}

TEST(Ingest, SortedAndDecoded) {
  TempDir dir;
  for (int i = 5; i >= 1; --i) {
    write_bytes(dir / ("f00" + std::to_string(i) + ".ppm"),
                encode_ppm(RgbRaster(8, 6, {std::uint8_t(i * 10), 0, 0})));
  }
  write_text(dir / "notes.txt", "ignored");
  write_text(dir / ".hidden.ppm", "ignored");
  IngestReport report;
  const auto seq = ingest_frames(dir.path(), &report);
  ASSERT_EQ(seq.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(seq.frames[i].name, "f00" + std::to_string(i + 1) + ".ppm");
    EXPECT_EQ(seq.frames[i].thumb.width(), 30);
    EXPECT_EQ(seq.frames[i].thumb.height(), 30);
    EXPECT_FALSE(seq.frames[i].pixels.has_value());
  }
  EXPECT_EQ(report.considered, 5u);
  EXPECT_TRUE(report.skipped.empty());
  EXPECT_EQ(load_pixels(seq.frames[2]), RgbRaster(8, 6, {30, 0, 0}));
}

TEST(Ingest, SingletonPgm) {
  TempDir dir;
  write_bytes(dir / "only.pgm", encode_pgm(GrayRaster(4, 4, 9)));
  EXPECT_EQ(ingest_frames(dir.path()).size(), 1u);
}

TEST(Ingest, TruncatedFileIsSkipped) {
  TempDir dir;
  for (int i = 0; i < 3; ++i) write_bytes(dir / ("f" + std::to_string(i) + ".ppm"), encode_ppm(RgbRaster(4, 4)));
  auto bad = encode_ppm(RgbRaster(4, 4));
  bad.resize(bad.size() - 1);
  write_bytes(dir / "f9.ppm", bad);
  IngestReport report;
  const auto seq = ingest_frames(dir.path(), &report, true);
  EXPECT_EQ(seq.size(), 3u);
  ASSERT_EQ(report.skipped.size(), 1u);
  EXPECT_EQ(report.skipped[0].file, "f9.ppm");
  EXPECT_TRUE(seq.frames[0].pixels.has_value());
}

TEST(Ingest, EmptyAndUndecodableDirectories) {
  TempDir empty;
  try {
    ingest_frames(empty.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyDirectory);
  }
  TempDir junk;
  write_text(junk / "a.ppm", "not an image");
  try {
    ingest_frames(junk.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoDecodableFrames);
  }
}
