#include "clipseek/range_index.hpp"

#include <bit>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

std::uint64_t pixels_in(const GrayHistogram& hist, RangeBucket range) {
  std::uint64_t sum = 0;
  for (int v = range.min; v <= range.max; ++v) sum += hist.bins[static_cast<std::size_t>(v)];
  return sum;
}

// Share strictly above pct percent of the canonical 900 pixels, in integers.
bool exceeds(std::uint64_t count, int pct) {
  return count * 100 > static_cast<std::uint64_t>(pct) * kCanonicalPixels;
}

}  // namespace

int RangeBucket::depth() const noexcept {
  const int width = max - min + 1;
  switch (width) {
    case 256: return 0;
    case 128: return 1;
    case 64: return 2;
    case 32: return 3;
    default: return -1;
  }
}

bool RangeBucket::is_valid() const noexcept {
  const int width = max - min + 1;
  return depth() >= 0 && min >= 0 && max <= 255 && min % width == 0;
}

std::optional<RangeBucket> RangeBucket::parent() const {
  if (is_root()) return std::nullopt;
  const int width = 2 * (max - min + 1);
  const int lo = (min / width) * width;
  return RangeBucket{lo, lo + width - 1};
}

RangeBucket RangeBucket::lower_child() const {
  const int half = (max - min + 1) / 2;
  return {min, min + half - 1};
}

RangeBucket RangeBucket::upper_child() const {
  const int half = (max - min + 1) / 2;
  return {min + half, max};
}

std::string RangeBucket::to_string() const {
  return "(" + std::to_string(min) + "," + std::to_string(max) + ")";
}

const std::vector<RangeBucket>& all_buckets() {
  static const std::vector<RangeBucket> nodes = [] {
    std::vector<RangeBucket> out{RangeBucket::root()};
    for (std::size_t i = 0; out.size() < 15; ++i) {
      out.push_back(out[i].lower_child());
      out.push_back(out[i].upper_child());
    }
    return out;
  }();
  return nodes;
}

RangeBucket assign_bucket(const GrayHistogram& hist) {
  const std::uint64_t total = hist.total();
  if (total != kCanonicalPixels) {
    fail(Errc::BadPixelCount, "bucket assignment needs a 900-pixel histogram, got " +
                                  std::to_string(total));
  }

  RangeBucket node = RangeBucket::root();
  node = exceeds(pixels_in(hist, node.lower_child()), kLevelOneThresholdPct) ? node.lower_child()
                                                                            : node.upper_child();
  for (int level = 2; level <= 3; ++level) {
    if (exceeds(pixels_in(hist, node.lower_child()), kDeeperThresholdPct)) {
      node = node.lower_child();
    } else if (exceeds(pixels_in(hist, node.upper_child()), kDeeperThresholdPct)) {
      node = node.upper_child();
    } else {
      break;
    }
  }
  return node;
}

void BucketTable::insert(KeyframeId kf, RangeBucket bucket) {
  if (!bucket.is_valid()) {
    fail(Errc::InvalidArgument, "not a range-tree node: " + bucket.to_string());
  }
  if (owner_.contains(kf)) {
    fail(Errc::DuplicateKeyframe, "keyframe " + std::to_string(kf) + " already indexed");
  }
  owner_.emplace(kf, bucket);
  buckets_[bucket].insert(kf);
}

const std::set<KeyframeId>& BucketTable::members(RangeBucket bucket) const {
  static const std::set<KeyframeId> empty;
  auto it = buckets_.find(bucket);
  return it == buckets_.end() ? empty : it->second;
}

std::optional<RangeBucket> BucketTable::bucket_of(KeyframeId kf) const {
  auto it = owner_.find(kf);
  if (it == owner_.end()) return std::nullopt;
  return it->second;
}

std::set<KeyframeId> BucketTable::subtree(RangeBucket bucket) const {
  std::set<KeyframeId> out;
  for (const auto& [node, ids] : buckets_) {
    if (bucket.contains(node)) out.insert(ids.begin(), ids.end());
  }
  return out;
}

std::set<KeyframeId> BucketTable::candidate_set(RangeBucket bucket,
                                                std::size_t min_candidates) const {
  if (!bucket.is_valid()) {
    fail(Errc::InvalidArgument, "not a range-tree node: " + bucket.to_string());
  }
  // The root stands for the whole catalog.
  std::set<KeyframeId> out = bucket.is_root() ? subtree(bucket) : members(bucket);
  RangeBucket node = bucket;
  while (out.size() < min_candidates) {
    auto up = node.parent();
    if (!up) break;
    node = *up;
    out = subtree(node);
  }
  return out;
}

}  // namespace clipseek
