#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "clipseek/catalog.hpp"
#include "clipseek/feature_vector.hpp"
#include "clipseek/keyframe.hpp"
#include "clipseek/range_index.hpp"

namespace clipseek {

/// FeatureVector of a stored keyframe under the given corpus scaling.
FeatureVector build_vector(const KeyframeRecord& kf, const ScalingStats& scale);

enum class Aggregation {
  /// Video score is the smallest distance over all evaluated keyframe pairs.
  MinDistance,
  /// Mean over query keyframes of the best distance to that video.
  MeanOfBest,
};

inline constexpr std::size_t kDefaultResultCount = 10;
inline constexpr std::size_t kDefaultMinCandidates = 20;

struct SearchOptions {
  std::size_t k = kDefaultResultCount;
  std::size_t min_candidates = kDefaultMinCandidates;
  std::optional<double> max_distance;
  double keyframe_threshold = kDefaultKeyframeThreshold;
  FeatureConfig features;
  BlockWeights weights;
  Aggregation aggregation = Aggregation::MinDistance;
};

struct RankedEntry {
  VideoId v_id = 0;
  double distance = 0.0;
  /// Position of the closest query keyframe within the query selection.
  std::size_t best_query_kf = 0;
  KeyframeId best_catalog_kf = 0;
};

struct SearchTimings {
  /// Whole query, including keyframe extraction and featurisation.
  double retrieval_s = 0.0;
  /// Distance evaluation and ordering only.
  double matching_s = 0.0;
};

struct RankedResult {
  std::vector<RankedEntry> entries;
  SearchTimings timings;
  std::size_t candidates_evaluated = 0;
};

/// A featurised query keyframe together with its range bucket.
struct QueryKeyframe {
  KeyframeFeatures features;
  RangeBucket bucket;
};

std::vector<QueryKeyframe> prepare_query(const FrameSeq& frames, const SearchOptions& options);

/// Ranks videos for prepared query keyframes. With `exhaustive` every stored
/// keyframe is compared; otherwise only the bucket candidates of each query
/// keyframe are.
RankedResult rank_videos(const CatalogSnapshot& catalog, std::span<const QueryKeyframe> query,
                         const SearchOptions& options, bool exhaustive);

/// Index-pruned search. Throws EmptySequence for an empty query.
RankedResult search_by_clip(const CatalogSnapshot& catalog, const FrameSeq& query,
                            const SearchOptions& options = {});

/// Same contract as search_by_clip with the index bypassed.
RankedResult search_exhaustive(const CatalogSnapshot& catalog, const FrameSeq& query,
                               const SearchOptions& options = {});

}  // namespace clipseek
