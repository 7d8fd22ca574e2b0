#include "clipseek/features.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::string_view column) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(Errc::ParseFailure, std::string(column) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

void check_capacity(const std::string& s, std::size_t capacity, std::string_view column) {
  if (s.size() > capacity) {
    fail(Errc::Overflow, std::string(column) + " string of " + std::to_string(s.size()) +
                             " chars exceeds column capacity " + std::to_string(capacity));
  }
}

// Flat list of populated cells; the feature sums only visit these.
struct Cell {
  int a;
  int b;
  double p;
};

}  // namespace

// ---------------------------------------------------------------------------

ColorHistogram color_histogram(const RgbRaster& img) {
  ColorHistogram h;
  for (const Rgb& p : img.pixels()) {
    ++h.joint[static_cast<std::size_t>(quantize_rgb(p))];
    ++h.channels[0][p.r];
    ++h.channels[1][p.g];
    ++h.channels[2][p.b];
  }
  return h;
}

// ---------------------------------------------------------------------------

GlcmMatrix glcm_matrix(const GrayRaster& img, int step) {
  if (step < 1) fail(Errc::InvalidArgument, "GLCM step must be >= 1");
  if (img.width() <= step) {
    fail(Errc::TooNarrow, "GLCM needs width > step (width " + std::to_string(img.width()) +
                              ", step " + std::to_string(step) + ")");
  }
  GlcmMatrix m;
  m.step_ = step;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x + step < img.width(); ++x) {
      const int a = img.at(x, y);
      const int b = img.at(x + step, y);
      ++m.counts_[GlcmMatrix::index(a, b)];
      ++m.counts_[GlcmMatrix::index(b, a)];
      m.pixel_counter_ += 2;
    }
  }
  return m;
}

GlcmFeatures glcm_features(const GlcmMatrix& glcm, CorrelationMode mode) {
  std::vector<Cell> cells;
  for (int a = 0; a < kGrayLevels; ++a) {
    for (int b = 0; b < kGrayLevels; ++b) {
      if (glcm.count(a, b) != 0) cells.push_back({a, b, glcm.probability(a, b)});
    }
  }

  GlcmFeatures f;
  f.pixel_counter = glcm.pixel_counter();
  f.step = glcm.step();

  double px = 0.0;
  double py = 0.0;
  for (const Cell& c : cells) {
    const double d = c.a - c.b;
    f.angular_second_moment += c.p * c.p;
    f.contrast += d * d * c.p;
    f.idm += c.p / (1.0 + d * d);
    f.entropy -= c.p * std::log(c.p);
    px += c.a * c.p;
    py += c.b * c.p;
  }

  // Variance accumulators, named stdev in the classic formulation.
  double var_x = 0.0;
  double var_y = 0.0;
  double covariance = 0.0;
  for (const Cell& c : cells) {
    var_x += (c.a - px) * (c.a - px) * c.p;
    var_y += (c.b - py) * (c.b - py) * c.p;
    covariance += (c.a - px) * (c.b - py) * c.p;
  }

  const double denom = mode == CorrelationMode::Literal ? var_x * var_y : std::sqrt(var_x * var_y);
  // Zero-variance texture has no linear dependence to measure.
  f.correlation = denom == 0.0 ? 0.0 : covariance / denom;
  return f;
}

GlcmFeatures glcm_features(const GrayRaster& img, int step, CorrelationMode mode) {
  return glcm_features(glcm_matrix(img, step), mode);
}

// ---------------------------------------------------------------------------

EdgeDensities edge_density(const GrayRaster& img, int threshold) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) fail(Errc::TooSmall, "edge density needs at least a 3x3 image");

  const int bw = w / kEdgeGrid;
  const int bh = h / kEdgeGrid;
  auto block_of = [](int coord, int block_size) {
    if (block_size == 0) return kEdgeGrid - 1;
    return std::min(coord / block_size, kEdgeGrid - 1);
  };

  std::array<std::uint64_t, kEdgeBlocks> edges{};
  std::array<std::uint64_t, kEdgeBlocks> area{};
  for (int y = 0; y < h; ++y) {
    const int by = block_of(y, bh);
    for (int x = 0; x < w; ++x) {
      const int block = by * kEdgeGrid + block_of(x, bw);
      ++area[static_cast<std::size_t>(block)];
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) continue;
      const int gx = (img.at(x + 1, y - 1) + 2 * img.at(x + 1, y) + img.at(x + 1, y + 1)) -
                     (img.at(x - 1, y - 1) + 2 * img.at(x - 1, y) + img.at(x - 1, y + 1));
      const int gy = (img.at(x - 1, y + 1) + 2 * img.at(x, y + 1) + img.at(x + 1, y + 1)) -
                     (img.at(x - 1, y - 1) + 2 * img.at(x, y - 1) + img.at(x + 1, y - 1));
      if (std::abs(gx) + std::abs(gy) >= threshold) ++edges[static_cast<std::size_t>(block)];
    }
  }

  EdgeDensities out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (area[i] == 0) continue;
    const std::uint64_t micro = (edges[i] * 2'000'000 + area[i]) / (2 * area[i]);
    out[i] = static_cast<double>(micro) / 1e6;
  }
  return out;
}

int major_regions(const RgbRaster& img, double min_fraction) {
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.size();

  // Union-find over pixel indices; neighbours join when their bins agree.
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&parent](std::uint32_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  std::vector<std::uint8_t> bins(n);
  for (std::size_t i = 0; i < n; ++i) bins[i] = static_cast<std::uint8_t>(quantize_rgb(img.pixels()[i]));

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::uint32_t>(y * w + x);
      if (x + 1 < w && bins[i] == bins[i + 1]) unite(i, i + 1);
      if (y + 1 < h && bins[i] == bins[i + static_cast<std::uint32_t>(w)]) {
        unite(i, i + static_cast<std::uint32_t>(w));
      }
    }
  }

  std::vector<std::uint32_t> size(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) ++size[find(i)];
  // Tolerance keeps an exact 5% component from losing to rounding of 0.05 * n.
  const double min_area = min_fraction * static_cast<double>(n) - 1e-9;
  int count = 0;
  for (std::uint32_t s : size) {
    if (s > 0 && static_cast<double>(s) >= min_area) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------

std::string format_shortest(double value) {
  if (!std::isfinite(value)) fail(Errc::InvalidArgument, "cannot serialise a non-finite value");
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string serialize_histogram(const JointHistogram& sch) {
  std::string s = "SCH " + std::to_string(sch.size());
  for (std::uint32_t v : sch) {
    s += ' ';
    s += std::to_string(v);
  }
  check_capacity(s, kSchCapacity, "SCH");
  return s;
}

std::string serialize_histogram(const ColorHistogram& hist) {
  return serialize_histogram(hist.joint);
}

JointHistogram parse_histogram(std::string_view text) {
  const auto tokens = split_spaces(text);
  if (tokens.size() != 2 + kSchBins || tokens[0] != "SCH" ||
      parse_number<int>(tokens[1], "SCH") != kSchBins) {
    fail(Errc::ParseFailure, "SCH: expected 'SCH 64' followed by 64 counts");
  }
  JointHistogram out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = parse_number<std::uint32_t>(tokens[i + 2], "SCH");
  }
  return out;
}

std::string serialize_glcm(const GlcmFeatures& g) {
  std::string s = "GLCM " + std::to_string(g.pixel_counter);
  for (double v : {g.angular_second_moment, g.contrast, g.correlation, g.idm, g.entropy}) {
    s += ' ';
    s += format_shortest(v);
  }
  check_capacity(s, kGlcmCapacity, "GLCM");
  return s;
}

GlcmFeatures parse_glcm(std::string_view text, int step) {
  const auto tokens = split_spaces(text);
  if (tokens.size() != 7 || tokens[0] != "GLCM") {
    fail(Errc::ParseFailure, "GLCM: expected 'GLCM' followed by 6 values");
  }
  GlcmFeatures g;
  g.pixel_counter = parse_number<std::uint64_t>(tokens[1], "GLCM");
  g.angular_second_moment = parse_number<double>(tokens[2], "GLCM");
  g.contrast = parse_number<double>(tokens[3], "GLCM");
  g.correlation = parse_number<double>(tokens[4], "GLCM");
  g.idm = parse_number<double>(tokens[5], "GLCM");
  g.entropy = parse_number<double>(tokens[6], "GLCM");
  g.step = step;
  return g;
}

std::string serialize_edges(const EdgeDensities& edges) {
  std::string s = "EDGE " + std::to_string(edges.size());
  for (double v : edges) {
    if (v < 0.0 || v > 1.0) fail(Errc::InvalidArgument, "edge density outside [0,1]");
    s += ' ';
    s += format_shortest(v);
  }
  check_capacity(s, kEdgeCapacity, "EDGEDENSITY");
  return s;
}

EdgeDensities parse_edges(std::string_view text) {
  const auto tokens = split_spaces(text);
  if (tokens.size() != 2 + kEdgeBlocks || tokens[0] != "EDGE" ||
      parse_number<int>(tokens[1], "EDGEDENSITY") != kEdgeBlocks) {
    fail(Errc::ParseFailure, "EDGEDENSITY: expected 'EDGE 16' followed by 16 values");
  }
  EdgeDensities out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = parse_number<double>(tokens[i + 2], "EDGEDENSITY");
    if (!(out[i] >= 0.0 && out[i] <= 1.0)) {
      fail(Errc::ParseFailure, "EDGEDENSITY: value outside [0,1]");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

KeyframeFeatures featurize(const RgbRaster& img, const FeatureConfig& config) {
  const GrayRaster gray = to_gray(img);
  KeyframeFeatures f;
  f.sch = color_histogram(img).joint;
  f.glcm = glcm_features(gray, config.glcm_step, config.correlation);
  f.edges = edge_density(gray, config.edge_threshold);
  f.major_regions = major_regions(img, config.major_region_fraction);
  return f;
}

}  // namespace clipseek
