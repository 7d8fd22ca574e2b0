#include "clipseek/motion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

// cos(k * 45deg) for circular code differences k = 0..4.
constexpr std::array<double, 5> kSectorCos = {1.0, 0.70710678118654752440, 0.0,
                                              -0.70710678118654752440, -1.0};

std::vector<Point2> resample(const std::vector<Point2>& pts, int samples) {
  std::vector<double> cumulative(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cumulative[i] = cumulative[i - 1] +
                    std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) fail(Errc::DegeneratePolyline, "trajectory has zero length");

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(samples));
  std::size_t seg = 1;
  for (int k = 0; k < samples; ++k) {
    const double target = total * k / (samples - 1);
    while (seg + 1 < pts.size() && cumulative[seg] < target) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double t = span > 0.0 ? std::clamp((target - cumulative[seg - 1]) / span, 0.0, 1.0) : 0.0;
    const Point2& a = pts[seg - 1];
    const Point2& b = pts[seg];
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  out.back() = pts.back();
  return out;
}

}  // namespace

void validate_trajectory(const Trajectory& t) {
  if (t.points.size() < 2) {
    fail(Errc::DegeneratePolyline, "a trajectory needs at least two points");
  }
  for (const Point2& p : t.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.x > 1.0 || p.y < 0.0 ||
        p.y > 1.0) {
      fail(Errc::BadCoordinates, "trajectory coordinates must lie in [0,1]");
    }
  }
}

std::uint8_t direction_code(double dx, double dy) noexcept {
  // Rotate by multiples of 90deg until the vector sits in [0, 90deg), then
  // split that quadrant at the diagonal.
  std::uint8_t quadrant = 0;
  if (dx <= 0.0 && dy > 0.0) {
    quadrant = 1;
    std::swap(dx, dy);
    dy = -dy;
  } else if (dx < 0.0 && dy <= 0.0) {
    quadrant = 2;
    dx = -dx;
    dy = -dy;
  } else if (dx >= 0.0 && dy < 0.0) {
    quadrant = 3;
    std::swap(dx, dy);
    dx = -dx;
  }
  // Now dx > 0 and dy >= 0 (or the zero vector, which codes as 0).
  const std::uint8_t half = dy >= dx && dx >= 0.0 && dy > 0.0 ? 1 : 0;
  return static_cast<std::uint8_t>(2 * quadrant + half);
}

GradientCodeSeq trajectory_gradients(const Trajectory& t, int samples) {
  if (t.points.size() < 2) {
    fail(Errc::DegeneratePolyline, "a trajectory needs at least two points");
  }
  if (samples < 2) fail(Errc::InvalidArgument, "resample count must be >= 2");
  const auto pts = resample(t.points, samples);
  GradientCodeSeq seq;
  seq.codes.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    seq.codes.push_back(direction_code(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y));
  }
  return seq;
}

double gradient_correlation(const GradientCodeSeq& q, const GradientCodeSeq& v) {
  if (q.codes.size() != v.codes.size()) {
    fail(Errc::LengthMismatch, "gradient sequences differ in length");
  }
  if (q.codes.empty()) fail(Errc::LengthMismatch, "gradient sequences are empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < q.codes.size(); ++i) {
    int diff = std::abs(int{q.codes[i]} - int{v.codes[i]}) % kDirectionSectors;
    diff = std::min(diff, kDirectionSectors - diff);
    sum += kSectorCos[static_cast<std::size_t>(diff)];
  }
  return sum / static_cast<double>(q.codes.size());
}

Trajectory derive_video_trajectory(std::span<const GrayRaster> keyframes, int diff_threshold) {
  if (keyframes.size() < 3) {
    fail(Errc::TooFewKeyframes, "motion needs at least three keyframes");
  }
  const int w = keyframes.front().width();
  const int h = keyframes.front().height();
  for (const GrayRaster& kf : keyframes) {
    if (kf.width() != w || kf.height() != h) {
      fail(Errc::DimensionMismatch, "keyframes differ in size");
    }
  }

  const std::size_t n = keyframes.size();
  const std::size_t pixels = keyframes.front().size();
  std::vector<std::uint8_t> background(pixels);
  std::vector<std::uint8_t> column(n);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t k = 0; k < n; ++k) column[k] = keyframes[k].pixels()[p];
    auto mid = column.begin() + static_cast<std::ptrdiff_t>((n - 1) / 2);
    std::nth_element(column.begin(), mid, column.end());
    background[p] = *mid;
  }

  Trajectory traj;
  traj.source = TrajectorySource::Derived;
  bool any_motion = false;
  for (const GrayRaster& kf : keyframes) {
    std::uint64_t count = 0;
    double sx = 0.0;
    double sy = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int diff = std::abs(int{kf.at(x, y)} -
                                  int{background[static_cast<std::size_t>(y * w + x)]});
        if (diff > diff_threshold) {
          ++count;
          sx += x;
          sy += y;
        }
      }
    }
    if (count == 0) {
      if (!traj.points.empty()) traj.points.push_back(traj.points.back());
      continue;
    }
    any_motion = true;
    const double cx = sx / static_cast<double>(count);
    const double cy = sy / static_cast<double>(count);
    traj.points.push_back({(cx + 0.5) / w, (cy + 0.5) / h});
  }
  if (!any_motion) fail(Errc::NoMotion, "no keyframe departs from the static background");
  return traj;
}

std::vector<MotionMatch> motion_rank(const Trajectory& query,
                                     std::span<const MotionCandidate> catalog) {
  const GradientCodeSeq q = trajectory_gradients(query);
  std::vector<MotionMatch> out;
  for (const MotionCandidate& c : catalog) {
    try {
      const GradientCodeSeq v = trajectory_gradients(c.trajectory);
      out.push_back({c.v_id, gradient_correlation(q, v)});
    } catch (const Error&) {
      // Degenerate stored trajectories carry no direction to compare.
    }
  }
  std::sort(out.begin(), out.end(), [](const MotionMatch& a, const MotionMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.v_id < b.v_id;
  });
  return out;
}

}  // namespace clipseek
