#include "clipseek/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <set>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct VideoScore {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_query_kf = 0;
  KeyframeId best_catalog_kf = 0;
  // MeanOfBest: best distance per query keyframe, infinity when unseen.
  std::vector<double> per_query;
};

RankedResult search(const CatalogSnapshot& catalog, const FrameSeq& query,
                    const SearchOptions& options, bool exhaustive) {
  const auto start = Clock::now();
  if (query.empty()) fail(Errc::EmptySequence, "query has no frames");
  if (catalog.keyframes().empty()) {
    RankedResult empty;
    empty.timings.retrieval_s = seconds_since(start);
    return empty;
  }
  const auto prepared = prepare_query(query, options);
  RankedResult result = rank_videos(catalog, prepared, options, exhaustive);
  result.timings.retrieval_s = seconds_since(start);
  return result;
}

}  // namespace

FeatureVector build_vector(const KeyframeRecord& kf, const ScalingStats& scale) {
  return build_vector(parse_features(kf), scale);
}

std::vector<QueryKeyframe> prepare_query(const FrameSeq& frames, const SearchOptions& options) {
  const KeyframeSelection selection = extract_keyframes(frames, options.keyframe_threshold);
  std::vector<QueryKeyframe> out;
  out.reserve(selection.indices.size());
  for (std::size_t index : selection.indices) {
    const Frame& frame = frames.frames[index];
    QueryKeyframe q;
    q.features = featurize(load_pixels(frame), options.features);
    q.bucket = assign_bucket(gray_histogram(frame.thumb));
    out.push_back(std::move(q));
  }
  return out;
}

RankedResult rank_videos(const CatalogSnapshot& catalog, std::span<const QueryKeyframe> query,
                         const SearchOptions& options, bool exhaustive) {
  const auto start = Clock::now();
  RankedResult result;

  std::vector<FeatureVector> vectors;
  vectors.reserve(query.size());
  for (const QueryKeyframe& q : query) vectors.push_back(build_vector(q.features, catalog.scaling()));

  std::map<VideoId, VideoScore> scores;
  for (std::size_t qi = 0; qi < query.size(); ++qi) {
    std::set<KeyframeId> pool;
    if (exhaustive) {
      for (const auto& [id, kf] : catalog.keyframes()) pool.insert(id);
    } else {
      pool = catalog.buckets().candidate_set(query[qi].bucket, options.min_candidates);
    }
    for (KeyframeId id : pool) {
      const double d = weighted_distance(vectors[qi], catalog.vector(id), options.weights);
      ++result.candidates_evaluated;
      const VideoId owner = catalog.keyframe(id).v_id;
      VideoScore& s = scores[owner];
      if (d < s.best || (d == s.best && id < s.best_catalog_kf)) {
        s.best = d;
        s.best_query_kf = qi;
        s.best_catalog_kf = id;
      }
      if (options.aggregation == Aggregation::MeanOfBest) {
        if (s.per_query.empty()) {
          s.per_query.assign(query.size(), std::numeric_limits<double>::infinity());
        }
        s.per_query[qi] = std::min(s.per_query[qi], d);
      }
    }
  }

  for (const auto& [v_id, s] : scores) {
    double distance = s.best;
    if (options.aggregation == Aggregation::MeanOfBest) {
      double sum = 0.0;
      std::size_t seen = 0;
      for (double d : s.per_query) {
        if (d == std::numeric_limits<double>::infinity()) continue;
        sum += d;
        ++seen;
      }
      distance = sum / static_cast<double>(seen);
    }
    if (options.max_distance && distance > *options.max_distance) continue;
    result.entries.push_back({v_id, distance, s.best_query_kf, s.best_catalog_kf});
  }

  std::sort(result.entries.begin(), result.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.v_id < b.v_id;
            });
  if (result.entries.size() > options.k) result.entries.resize(options.k);
  result.timings.matching_s = seconds_since(start);
  return result;
}

RankedResult search_by_clip(const CatalogSnapshot& catalog, const FrameSeq& query,
                            const SearchOptions& options) {
  return search(catalog, query, options, false);
}

RankedResult search_exhaustive(const CatalogSnapshot& catalog, const FrameSeq& query,
                               const SearchOptions& options) {
  return search(catalog, query, options, true);
}

}  // namespace clipseek
