#pragma once

// Shared fixtures and independent reference implementations for the test
// suites. The oracles deliberately use different formulations from the
// library code (plain loops, floating point where the library is integral,
// list-deletion where the library scans indices).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clipseek/error.hpp"
#include "clipseek/features.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/range_index.hpp"
#include "clipseek/raster.hpp"

namespace clipseek::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

/// Code of the clipseek::Error thrown by `fn`, or nullopt when nothing is.
template <typename Fn>
std::optional<Errc> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& p, const std::string& text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);
std::string read_text(const std::filesystem::path& p);

GrayRaster random_gray(std::mt19937_64& rng, int w, int h, int levels = 256);
RgbRaster random_rgb(std::mt19937_64& rng, int w, int h);
RgbRaster gray_to_rgb(const GrayRaster& g);

// --- reference evaluation data ---------------------------------------------

/// Ten reference retrieval counts with the two-decimal precision and recall
/// printed next to them.
struct ReferenceRow {
  std::string query;
  std::size_t matched;
  std::size_t retrieved;
  std::size_t available;
  std::string precision;
  std::string recall;
};

const std::vector<ReferenceRow>& reference_rows();

// --- oracles ---------------------------------------------------------------

struct OracleGlcm {
  std::vector<double> p;  // 256 x 256, row-major
  double asm_ = 0, contrast = 0, correlation = 0, idm = 0, entropy = 0;
  double sum = 0;
  std::uint64_t pixel_counter = 0;
};

/// Full double loop over every cell of a floating-point matrix built pair by
/// pair.
OracleGlcm glcm_oracle(const GrayRaster& img, int step, CorrelationMode mode);

/// Evaluates the admissibility of all 15 tree nodes from their percentages
/// and returns the deepest node on an admissible path.
RangeBucket range_oracle(const GrayHistogram& hist);

/// Pseudocode-style scan: take the head of the remaining list as key, drop
/// following files within the threshold, stop at the first one beyond it and
/// repeat from there.
std::vector<std::size_t> keyframe_oracle(const std::vector<std::vector<double>>& dist, double threshold);

/// |Gx| + |Gy| >= threshold on interior pixels, block-counted.
EdgeDensities sobel_oracle(const GrayRaster& img, int threshold = 128);

/// Recursive-free BFS flood fill over joint bins.
int regions_oracle(const RgbRaster& img, double fraction = 0.05);

/// Direction sector by atan2.
int sector_oracle(double dx, double dy);

/// Centroid of pixels differing from `background` by more than `threshold`,
/// normalised with the half-pixel offset.
Point2 centroid_oracle(const GrayRaster& frame, const GrayRaster& background, int threshold);

}  // namespace clipseek::testing
