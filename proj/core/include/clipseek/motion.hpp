#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clipseek/raster.hpp"

namespace clipseek {

using VideoId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class TrajectorySource { Sketch, Derived };

/// Ordered points in image-normalised coordinates, y growing downwards.
struct Trajectory {
  std::vector<Point2> points;
  TrajectorySource source = TrajectorySource::Sketch;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Throws DegeneratePolyline for fewer than two points and BadCoordinates
/// for anything outside [0,1] or non-finite.
void validate_trajectory(const Trajectory& t);

inline constexpr int kResamplePoints = 32;
inline constexpr int kDirectionSectors = 8;
inline constexpr int kMotionDiffThreshold = 30;

/// Direction codes 0..7, one per 45-degree sector counted from +x towards +y.
struct GradientCodeSeq {
  std::vector<std::uint8_t> codes;

  friend bool operator==(const GradientCodeSeq&, const GradientCodeSeq&) = default;
};

/// Sector of the displacement (dx, dy): floor(angle / 45deg) with the angle
/// in [0, 360). Decided with exact comparisons, not trigonometry.
std::uint8_t direction_code(double dx, double dy) noexcept;

/// Resamples the polyline to `samples` points equally spaced by arc length,
/// then codes each consecutive displacement. Throws DegeneratePolyline when
/// the total length is zero or there are fewer than two points.
GradientCodeSeq trajectory_gradients(const Trajectory& t, int samples = kResamplePoints);

/// Mean cosine of the angular difference between paired codes, in [-1, 1].
/// Throws LengthMismatch for sequences of different length.
double gradient_correlation(const GradientCodeSeq& q, const GradientCodeSeq& v);

/// Object trajectory from an ordered run of canonical keyframes. A per-pixel
/// temporal median stands in for the static background; each keyframe's
/// point is the centroid of pixels deviating from it by more than
/// `diff_threshold`. A keyframe with no such pixels repeats the previous
/// point. Throws TooFewKeyframes below three keyframes and NoMotion when no
/// keyframe deviates anywhere.
Trajectory derive_video_trajectory(std::span<const GrayRaster> keyframes,
                                   int diff_threshold = kMotionDiffThreshold);

struct MotionCandidate {
  VideoId v_id = 0;
  Trajectory trajectory;
};

struct MotionMatch {
  VideoId v_id = 0;
  double score = 0.0;
};

/// Scores every candidate against the query, best first; ties go to the lower
/// id. Candidates whose trajectory cannot be coded are left out.
std::vector<MotionMatch> motion_rank(const Trajectory& query,
                                     std::span<const MotionCandidate> catalog);

}  // namespace clipseek
