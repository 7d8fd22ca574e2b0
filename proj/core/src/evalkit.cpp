#include "clipseek/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <sstream>

#include <json.hpp>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

double mean_of(const std::vector<QueryReport>& rows, double QueryReport::*field) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const QueryReport& r : rows) sum += r.*field;
  return sum / static_cast<double>(rows.size());
}

void fill_scores(QueryReport& row) {
  const QueryJudgment& j = row.judgment;
  row.precision = j.total_retrieved > 0 ? precision(j) : 0.0;
  row.recall_paper = j.total_relevant_available > 0 ? recall(j, RecallMode::RetrievedShare) : 0.0;
  row.recall_standard = j.total_relevant_available > 0 ? recall(j, RecallMode::Standard) : 0.0;
}

void fill_means(BenchmarkReport& report) {
  report.mean_precision = mean_of(report.queries, &QueryReport::precision);
  report.mean_recall_paper = mean_of(report.queries, &QueryReport::recall_paper);
  report.mean_recall_standard = mean_of(report.queries, &QueryReport::recall_standard);
}

// Rounded cell, or "-" where the ratio is undefined.
std::string ratio_cell(std::size_t num, std::size_t den) {
  if (den == 0) return "-";
  return format_hundredths(hundredths_half_up(std::min(num, den), den));
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

QueryReport run_one(const CatalogSnapshot& catalog, const LabeledQuery& q,
                    const SearchOptions& options) {
  const RankedResult result = search_by_clip(catalog, q.frames, options);
  QueryReport row;
  row.judgment.query_name = q.name;
  row.judgment.total_retrieved = result.entries.size();
  row.judgment.total_relevant_available = q.relevant.size();
  for (const RankedEntry& e : result.entries) {
    row.retrieved.push_back(e.v_id);
    if (q.relevant.contains(e.v_id)) ++row.judgment.relevant_retrieved;
  }
  row.retrieval_s = result.timings.retrieval_s;
  row.matching_s = result.timings.matching_s;
  fill_scores(row);
  return row;
}

}  // namespace

void validate_judgment(const QueryJudgment& j) {
  if (j.relevant_retrieved > j.total_retrieved ||
      j.relevant_retrieved > j.total_relevant_available) {
    fail(Errc::InvalidArgument, "judgment '" + j.query_name +
                                    "': matched count exceeds retrieved or available count");
  }
}

double precision(const QueryJudgment& j) {
  validate_judgment(j);
  if (j.total_retrieved == 0) fail(Errc::NoRetrievals, "no videos retrieved for '" + j.query_name + "'");
  return static_cast<double>(j.relevant_retrieved) / static_cast<double>(j.total_retrieved);
}

double recall(const QueryJudgment& j, RecallMode mode) {
  validate_judgment(j);
  if (j.total_relevant_available == 0) {
    fail(Errc::NoRelevantVideos, "no relevant videos for '" + j.query_name + "'");
  }
  const auto den = static_cast<double>(j.total_relevant_available);
  if (mode == RecallMode::Standard) return static_cast<double>(j.relevant_retrieved) / den;
  return std::min(1.0, static_cast<double>(j.total_retrieved) / den);
}

std::int64_t hundredths_half_up(std::uint64_t num, std::uint64_t den) {
  if (den == 0) fail(Errc::InvalidArgument, "zero denominator");
  // floor(100*num/den + 1/2) without going through floating point.
  return static_cast<std::int64_t>((200 * num + den) / (2 * den));
}

std::string format_hundredths(std::int64_t h) {
  const bool negative = h < 0;
  const std::int64_t a = negative ? -h : h;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", negative ? "-" : "",
                static_cast<long long>(a / 100), static_cast<long long>(a % 100));
  return buf;
}

JudgmentScores rounded_scores(const QueryJudgment& j) {
  precision(j);
  recall(j, RecallMode::RetrievedShare);
  JudgmentScores s;
  s.precision_h = hundredths_half_up(j.relevant_retrieved, j.total_retrieved);
  s.recall_paper_h = hundredths_half_up(std::min(j.total_retrieved, j.total_relevant_available),
                                        j.total_relevant_available);
  s.recall_standard_h = hundredths_half_up(j.relevant_retrieved, j.total_relevant_available);
  return s;
}

BenchmarkReport run_benchmark(const CatalogSnapshot& catalog, const std::vector<LabeledQuery>& queries,
                              const BenchmarkOptions& options) {
  for (const LabeledQuery& q : queries) {
    for (VideoId id : q.relevant) {
      if (!catalog.videos().contains(id)) {
        fail(Errc::NotFound, "query '" + q.name + "' names unknown video id " + std::to_string(id));
      }
    }
  }

  BenchmarkReport report;
  if (options.parallel) {
    report.timings_reliable = false;
    std::vector<std::future<QueryReport>> pending;
    pending.reserve(queries.size());
    for (const LabeledQuery& q : queries) {
      pending.push_back(std::async(std::launch::async, run_one, std::cref(catalog), std::cref(q),
                                   std::cref(options.search)));
    }
    for (auto& f : pending) report.queries.push_back(f.get());
  } else {
    for (const LabeledQuery& q : queries) report.queries.push_back(run_one(catalog, q, options.search));
  }
  fill_means(report);
  return report;
}

BenchmarkReport report_from_judgments(const std::vector<QueryJudgment>& judgments) {
  BenchmarkReport report;
  for (const QueryJudgment& j : judgments) {
    validate_judgment(j);
    QueryReport row;
    row.judgment = j;
    fill_scores(row);
    report.queries.push_back(std::move(row));
  }
  fill_means(report);
  return report;
}

std::string render_text(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[256];

  out << "Retrieval counts\n";
  std::snprintf(line, sizeof line, "%-24s %8s %10s %10s\n", "query", "matched", "retrieved", "available");
  out << line;
  for (const QueryReport& r : report.queries) {
    const QueryJudgment& j = r.judgment;
    std::snprintf(line, sizeof line, "%-24s %8zu %10zu %10zu\n", j.query_name.c_str(),
                  j.relevant_retrieved, j.total_retrieved, j.total_relevant_available);
    out << line;
  }

  out << "\nPrecision and recall\n";
  std::snprintf(line, sizeof line, "%-24s %9s %12s %15s\n", "query", "precision", "recall_paper",
                "recall_standard");
  out << line;
  for (const QueryReport& r : report.queries) {
    const QueryJudgment& j = r.judgment;
    std::snprintf(line, sizeof line, "%-24s %9s %12s %15s\n", j.query_name.c_str(),
                  ratio_cell(j.relevant_retrieved, j.total_retrieved).c_str(),
                  ratio_cell(j.total_retrieved, j.total_relevant_available).c_str(),
                  ratio_cell(j.relevant_retrieved, j.total_relevant_available).c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-24s %9s %12s %15s\n", "mean",
                fixed(report.mean_precision, 2).c_str(), fixed(report.mean_recall_paper, 2).c_str(),
                fixed(report.mean_recall_standard, 2).c_str());
  out << line;
  return out.str();
}

std::string render_timings(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[256];
  out << "Timings (s)" << (report.timings_reliable ? "" : " [unreliable: parallel run]") << "\n";
  std::snprintf(line, sizeof line, "%-24s %10s %10s\n", "query", "retrieval", "matching");
  out << line;
  for (const QueryReport& r : report.queries) {
    std::snprintf(line, sizeof line, "%-24s %10s %10s\n", r.judgment.query_name.c_str(),
                  fixed(r.retrieval_s, 2).c_str(), fixed(r.matching_s, 2).c_str());
    out << line;
  }
  return out.str();
}

std::string render_json(const BenchmarkReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const QueryReport& r : report.queries) {
    const QueryJudgment& j = r.judgment;
    rows.push_back({
        {"query", j.query_name},
        {"matched", j.relevant_retrieved},
        {"retrieved", j.total_retrieved},
        {"available", j.total_relevant_available},
        {"retrieved_ids", r.retrieved},
        {"precision", r.precision},
        {"recall_paper", r.recall_paper},
        {"recall_standard", r.recall_standard},
        {"retrieval_s", r.retrieval_s},
        {"matching_s", r.matching_s},
    });
  }
  nlohmann::ordered_json doc = {
      {"queries", rows},
      {"mean_precision", report.mean_precision},
      {"mean_recall_paper", report.mean_recall_paper},
      {"mean_recall_standard", report.mean_recall_standard},
      {"timings_reliable", report.timings_reliable},
  };
  return doc.dump(2) + "\n";
}

std::string render_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "query,precision,recall_paper,recall_standard,retrieval_s,matching_s\n";
  for (const QueryReport& r : report.queries) {
    std::string name = r.judgment.query_name;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      name = quoted + "\"";
    }
    out << name << ',' << fixed(r.precision, 6) << ',' << fixed(r.recall_paper, 6) << ','
        << fixed(r.recall_standard, 6) << ',' << fixed(r.retrieval_s, 6) << ','
        << fixed(r.matching_s, 6) << '\n';
  }
  return out.str();
}

}  // namespace clipseek
