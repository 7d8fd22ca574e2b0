#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "clipseek/catalog.hpp"
#include "clipseek/keyframe.hpp"
#include "clipseek/retrieval.hpp"

namespace clipseek {

struct QueryJudgment {
  std::string query_name;
  /// Relevant videos among the retrieved ones.
  std::size_t relevant_retrieved = 0;
  std::size_t total_retrieved = 0;
  std::size_t total_relevant_available = 0;
};

/// Throws InvalidArgument when counts are inconsistent.
void validate_judgment(const QueryJudgment& j);

/// relevant_retrieved / total_retrieved. Throws NoRetrievals.
double precision(const QueryJudgment& j);

enum class RecallMode {
  /// min(1, total_retrieved / total_relevant_available). Reported as
  /// `recall_paper`.
  RetrievedShare,
  /// relevant_retrieved / total_relevant_available.
  Standard,
};

/// Throws NoRelevantVideos.
double recall(const QueryJudgment& j, RecallMode mode);

/// num/den rounded half-up to two decimals, exactly, as an integer count of
/// hundredths. den must be positive.
std::int64_t hundredths_half_up(std::uint64_t num, std::uint64_t den);

/// "0.80" style rendering of hundredths_half_up.
std::string format_hundredths(std::int64_t hundredths);

struct JudgmentScores {
  std::int64_t precision_h = 0;
  std::int64_t recall_paper_h = 0;
  std::int64_t recall_standard_h = 0;
};

/// Precision and both recalls, each rounded half-up to hundredths.
JudgmentScores rounded_scores(const QueryJudgment& j);

struct LabeledQuery {
  std::string name;
  FrameSeq frames;
  std::set<VideoId> relevant;
};

struct QueryReport {
  QueryJudgment judgment;
  std::vector<VideoId> retrieved;
  double precision = 0.0;
  double recall_paper = 0.0;
  double recall_standard = 0.0;
  double retrieval_s = 0.0;
  double matching_s = 0.0;
};

struct BenchmarkReport {
  std::vector<QueryReport> queries;
  double mean_precision = 0.0;
  double mean_recall_paper = 0.0;
  double mean_recall_standard = 0.0;
  /// Set when queries ran concurrently; timing columns then overlap.
  bool timings_reliable = true;
};

struct BenchmarkOptions {
  SearchOptions search;
  bool parallel = false;
};

/// Runs search_by_clip for every query and scores it against its relevant
/// set. Throws NotFound naming any relevant id missing from the catalog.
BenchmarkReport run_benchmark(const CatalogSnapshot& catalog, const std::vector<LabeledQuery>& queries,
                              const BenchmarkOptions& options = {});

/// Report over precomputed judgments; timings are zero.
BenchmarkReport report_from_judgments(const std::vector<QueryJudgment>& judgments);

/// Retrieval counts and precision/recall tables. Deterministic for a fixed
/// catalog and query set.
std::string render_text(const BenchmarkReport& report);
/// Per-query retrieval and matching times.
std::string render_timings(const BenchmarkReport& report);
std::string render_json(const BenchmarkReport& report);
/// Header `query,precision,recall_paper,recall_standard,retrieval_s,matching_s`.
std::string render_csv(const BenchmarkReport& report);

}  // namespace clipseek
