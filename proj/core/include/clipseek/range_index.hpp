#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clipseek/raster.hpp"

namespace clipseek {

using KeyframeId = std::int64_t;

/// Node of the three-level gray-range tree: (0,255) at the root, then
/// halves, quarters and eighths of the gray axis.
struct RangeBucket {
  int min = 0;
  int max = 255;

  static constexpr RangeBucket root() noexcept { return {0, 255}; }

  /// 0 for the root, 3 for the 32-wide leaves.
  int depth() const noexcept;
  bool is_valid() const noexcept;
  bool is_root() const noexcept { return min == 0 && max == 255; }
  std::optional<RangeBucket> parent() const;
  RangeBucket lower_child() const;
  RangeBucket upper_child() const;
  bool contains(const RangeBucket& other) const noexcept {
    return min <= other.min && other.max <= max;
  }

  std::string to_string() const;

  friend auto operator<=>(const RangeBucket&, const RangeBucket&) = default;
};

/// All 15 tree nodes in breadth-first order.
const std::vector<RangeBucket>& all_buckets();

inline constexpr int kLevelOneThresholdPct = 55;
inline constexpr int kDeeperThresholdPct = 60;

/// Descends from the root. Level one goes to (0,127) when more than 55% of
/// the 900 pixels lie in [0,127], else to (128,255). Each deeper level moves
/// into the lower child if it holds more than 60%, otherwise the upper child
/// if it holds more than 60%, otherwise stops. Throws BadPixelCount unless the
/// histogram sums to 900.
RangeBucket assign_bucket(const GrayHistogram& hist);

/// Keyframe ids grouped by bucket. Each id lives in exactly one bucket.
class BucketTable {
 public:
  /// Throws DuplicateKeyframe if `kf` is already present, InvalidArgument for
  /// a bucket that is not a tree node.
  void insert(KeyframeId kf, RangeBucket bucket);

  const std::set<KeyframeId>& members(RangeBucket bucket) const;
  std::optional<RangeBucket> bucket_of(KeyframeId kf) const;

  /// Union of the bucket and all its descendants.
  std::set<KeyframeId> subtree(RangeBucket bucket) const;

  /// Members of `bucket`; while fewer than `min_candidates`, widens to the
  /// parent's whole subtree, up to the root.
  std::set<KeyframeId> candidate_set(RangeBucket bucket, std::size_t min_candidates) const;

  std::size_t size() const noexcept { return owner_.size(); }
  const std::map<RangeBucket, std::set<KeyframeId>>& buckets() const noexcept { return buckets_; }

 private:
  std::map<RangeBucket, std::set<KeyframeId>> buckets_;
  std::map<KeyframeId, RangeBucket> owner_;
};

}  // namespace clipseek
