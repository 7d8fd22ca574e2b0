#include "support.hpp"

#include <unistd.h>

#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace clipseek::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto candidate = fs::temp_directory_path() /
                           ("clipseek-test-" + std::to_string(::getpid()) + "-" + std::to_string(rng() % 1000000007));
    std::error_code ec;
    if (fs::create_directory(candidate, ec)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& p, const std::string& text) {
  write_bytes(p, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

GrayRaster random_gray(std::mt19937_64& rng, int w, int h, int levels) {
  GrayRaster g(w, h);
  for (auto& v : g.pixels()) v = static_cast<std::uint8_t>(rng() % static_cast<unsigned>(levels));
  return g;
}

RgbRaster random_rgb(std::mt19937_64& rng, int w, int h) {
  RgbRaster img(w, h);
  for (auto& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
         static_cast<std::uint8_t>(rng() % 256)};
  }
  return img;
}

RgbRaster gray_to_rgb(const GrayRaster& g) {
  RgbRaster img(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      const auto v = g.at(x, y);
      img.at(x, y) = {v, v, v};
    }
  }
  return img;
}

const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {"vid1.mpeg", 4, 5, 9, "0.80", "0.56"},   {"vid2.mpeg", 5, 5, 7, "1.00", "0.71"},
      {"vid3.mpeg", 4, 5, 8, "0.80", "0.63"},   {"vid4.mpeg", 8, 9, 12, "0.89", "0.75"},
      {"vid5.mpeg", 8, 11, 14, "0.73", "0.79"}, {"vid1.mpeg", 9, 11, 12, "0.82", "0.92"},
      {"vid2.mpeg", 8, 8, 10, "1.00", "0.80"},  {"vid3.mpeg", 7, 8, 9, "0.88", "0.89"},
      {"vid4.mpeg", 7, 7, 10, "1.00", "0.70"},  {"vid5.mpeg", 8, 8, 9, "1.00", "0.89"},
  };
  return rows;
}

OracleGlcm glcm_oracle(const GrayRaster& img, int step, CorrelationMode mode) {
  OracleGlcm o;
  o.p.assign(256 * 256, 0.0);
  double pairs = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x + step < img.width(); ++x) {
      const int a = img.at(x, y);
      const int b = img.at(x + step, y);
      o.p[a * 256 + b] += 1.0;
      o.p[b * 256 + a] += 1.0;
      pairs += 2;
    }
  }
  o.pixel_counter = static_cast<std::uint64_t>(pairs);
  for (double& v : o.p) v /= pairs;

  double px = 0, py = 0;
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      const double p = o.p[a * 256 + b];
      o.sum += p;
      o.asm_ += p * p;
      o.contrast += (a - b) * (a - b) * p;
      o.idm += p / (1.0 + (a - b) * (a - b));
      if (p > 0) o.entropy -= p * std::log(p);
      px += a * p;
      py += b * p;
    }
  }
  double vx = 0, vy = 0, cov = 0;
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      const double p = o.p[a * 256 + b];
      vx += (a - px) * (a - px) * p;
      vy += (b - py) * (b - py) * p;
      cov += (a - px) * (b - py) * p;
    }
  }
  const double denom = mode == CorrelationMode::Literal ? vx * vy : std::sqrt(vx * vy);
  o.correlation = denom == 0 ? 0.0 : cov / denom;
  return o;
}

RangeBucket range_oracle(const GrayHistogram& hist) {
  auto pct = [&](const RangeBucket& b) {
    double n = 0;
    for (int v = b.min; v <= b.max; ++v) n += hist.bins[v];
    return 100.0 * n / 900.0;
  };
  struct Node {
    RangeBucket b;
    int parent;
    bool lower;
  };
  // Breadth-first: index 0 root, 1-2 halves, 3-6 quarters, 7-14 eighths.
  std::vector<Node> nodes;
  nodes.push_back({{0, 255}, -1, false});
  for (int i = 0; i < 7; ++i) {
    const auto [lo, hi] = nodes[i].b;
    const int mid = (lo + hi) / 2;
    nodes.push_back({{lo, mid}, i, true});
    nodes.push_back({{mid + 1, hi}, i, false});
  }
  std::vector<bool> admissible(nodes.size(), false);
  admissible[0] = true;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (!admissible[n.parent]) continue;
    const bool level_one = n.parent == 0;
    const RangeBucket sibling_lower = nodes[n.parent * 2 + 1].b;
    if (level_one) {
      const bool go_lower = pct(sibling_lower) > 55.0;
      admissible[i] = n.lower ? go_lower : !go_lower;
    } else {
      const bool lower_ok = pct(sibling_lower) > 60.0;
      admissible[i] = n.lower ? lower_ok : (!lower_ok && pct(n.b) > 60.0);
    }
  }
  RangeBucket best = nodes[0].b;
  int best_depth = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int depth = i == 0 ? 0 : i < 3 ? 1 : i < 7 ? 2 : 3;
    if (admissible[i] && depth > best_depth) {
      best = nodes[i].b;
      best_depth = depth;
    }
  }
  return best;
}

std::vector<std::size_t> keyframe_oracle(const std::vector<std::vector<double>>& dist, double threshold) {
  std::deque<std::size_t> remaining;
  for (std::size_t i = 0; i < dist.size(); ++i) remaining.push_back(i);
  std::vector<std::size_t> keys;
  while (!remaining.empty()) {
    const std::size_t key = remaining.front();
    remaining.pop_front();
    keys.push_back(key);
    while (!remaining.empty() && dist[key][remaining.front()] <= threshold) remaining.pop_front();
  }
  return keys;
}

EdgeDensities sobel_oracle(const GrayRaster& img, int threshold) {
  const int w = img.width();
  const int h = img.height();
  const int bw = w / 4;
  const int bh = h / 4;
  std::array<double, 16> edges{};
  std::array<double, 16> area{};
  auto block_of = [&](int x, int y) {
    const int bx = bw == 0 ? 3 : std::min(3, x / bw);
    const int by = bh == 0 ? 3 : std::min(3, y / bh);
    return by * 4 + bx;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int blk = block_of(x, y);
      area[blk] += 1;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) continue;
      auto p = [&](int dx, int dy) { return static_cast<int>(img.at(x + dx, y + dy)); };
      const int gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const int gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      if (std::abs(gx) + std::abs(gy) >= threshold) edges[blk] += 1;
    }
  }
  EdgeDensities out{};
  for (int i = 0; i < 16; ++i) out[i] = area[i] == 0 ? 0.0 : edges[i] / area[i];
  return out;
}

int regions_oracle(const RgbRaster& img, double fraction) {
  const int w = img.width();
  const int h = img.height();
  std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
  int count = 0;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (seen[sy * w + sx]) continue;
      const int bin = quantize_rgb(img.at(sx, sy));
      std::deque<std::pair<int, int>> queue{{sx, sy}};
      seen[sy * w + sx] = 1;
      double area = 0;
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        area += 1;
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
          if (seen[ny[k] * w + nx[k]] || quantize_rgb(img.at(nx[k], ny[k])) != bin) continue;
          seen[ny[k] * w + nx[k]] = 1;
          queue.push_back({nx[k], ny[k]});
        }
      }
      if (area / (static_cast<double>(w) * h) >= fraction) ++count;
    }
  }
  return count;
}

int sector_oracle(double dx, double dy) {
  double angle = std::atan2(dy, dx);
  if (angle < 0) angle += 2 * std::numbers::pi;
  return static_cast<int>(std::floor(angle / (std::numbers::pi / 4))) % 8;
}

Point2 centroid_oracle(const GrayRaster& frame, const GrayRaster& background, int threshold) {
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (std::abs(frame.at(x, y) - background.at(x, y)) > threshold) {
        sx += x;
        sy += y;
        n += 1;
      }
    }
  }
  return {(sx / n + 0.5) / frame.width(), (sy / n + 0.5) / frame.height()};
}

}  // namespace clipseek::testing
