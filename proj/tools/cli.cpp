#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "clipseek/catalog.hpp"
#include "clipseek/corpus.hpp"
#include "clipseek/error.hpp"
#include "clipseek/evalkit.hpp"
#include "clipseek/keyframe.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/retrieval.hpp"
#include "clipseek/service.hpp"

namespace clipseek::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string catalog_root;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::NotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) fail(Errc::Io, "cannot write " + path.string());
}

std::unique_ptr<Catalog> open_catalog(Context& ctx) {
  LoadReport report;
  auto catalog = std::make_unique<Catalog>(ctx.catalog_root, &report);
  for (const QuarantinedLine& q : report.quarantined) {
    ctx.err << "warning: journal line " << q.line << " skipped: " << q.reason << "\n";
  }
  return catalog;
}

FrameSeq load_frames(Context& ctx, const std::string& dir, bool keep_pixels) {
  IngestReport report;
  FrameSeq frames = ingest_frames(dir, &report, keep_pixels);
  for (const SkippedFrame& s : report.skipped) {
    ctx.err << "warning: skipped " << s.file << ": " << s.reason << "\n";
  }
  return frames;
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string frames;
  double threshold = kDefaultKeyframeThreshold;
};

int cmd_ingest(Context& ctx, const IngestArgs& a) {
  const FrameSeq frames = load_frames(ctx, a.frames, false);
  const KeyframeSelection sel = extract_keyframes(frames, a.threshold);
  ctx.out << "frames=" << frames.size() << " keyframes=" << sel.indices.size() << "\n";
  for (std::size_t i : sel.indices) ctx.out << i << "\t" << frames.frames[i].name << "\n";
  return kExitOk;
}

// ---- register -------------------------------------------------------------

struct RegisterArgs {
  std::string name;
  std::string frames;
  double threshold = kDefaultKeyframeThreshold;
  std::size_t max_frames = kDefaultMaxFrames;
};

int cmd_register(Context& ctx, const RegisterArgs& a) {
  auto catalog = open_catalog(ctx);
  const FrameSeq frames = load_frames(ctx, a.frames, false);
  RegistrationConfig config;
  config.keyframe_threshold = a.threshold;
  config.max_frames = a.max_frames;
  const Registration reg = catalog->register_video(a.name, frames, config);
  ctx.out << "v_id=" << reg.video.v_id << " keyframes=" << reg.keyframes.size() << "\n";
  return kExitOk;
}

// ---- search ---------------------------------------------------------------

struct SearchArgs {
  std::string frames;
  std::size_t k = kDefaultResultCount;
  std::size_t min_candidates = kDefaultMinCandidates;
  std::optional<double> max_distance;
  double threshold = kDefaultKeyframeThreshold;
  bool exhaustive = false;
  bool mean_of_best = false;
};

int cmd_search(Context& ctx, const SearchArgs& a) {
  auto catalog = open_catalog(ctx);
  const FrameSeq frames = load_frames(ctx, a.frames, true);
  SearchOptions options;
  options.k = a.k;
  options.min_candidates = a.min_candidates;
  options.max_distance = a.max_distance;
  options.keyframe_threshold = a.threshold;
  if (a.mean_of_best) options.aggregation = Aggregation::MeanOfBest;
  const auto snap = catalog->snapshot();
  const RankedResult result =
      a.exhaustive ? search_exhaustive(*snap, frames, options) : search_by_clip(*snap, frames, options);
  if (result.entries.empty()) {
    ctx.out << "no results\n";
  } else {
    ctx.out << "rank\tv_id\tname\tdistance\n";
    std::size_t rank = 0;
    for (const RankedEntry& e : result.entries) {
      ctx.out << ++rank << "\t" << e.v_id << "\t" << snap->video(e.v_id).v_name << "\t"
              << fixed6(e.distance) << "\n";
    }
  }
  ctx.err << "retrieval_s=" << fixed6(result.timings.retrieval_s)
          << " matching_s=" << fixed6(result.timings.matching_s) << "\n";
  return kExitOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::size_t k = kDefaultResultCount;
  std::size_t min_candidates = kDefaultMinCandidates;
  std::optional<double> max_distance;
  std::string csv;
  std::string json_out;
  bool parallel = false;
};

template <typename T>
T field(const json& entry, const char* key, const std::string& where) {
  if (!entry.contains(key)) fail(Errc::ParseFailure, where + ": missing \"" + key + "\"");
  try {
    return entry.at(key).get<T>();
  } catch (const json::exception&) {
    fail(Errc::ParseFailure, where + ": bad \"" + key + "\"");
  }
}

BenchmarkReport eval_manifest(Context& ctx, const EvalArgs& a) {
  json doc;
  try {
    doc = json::parse(read_text(a.manifest));
  } catch (const json::exception& e) {
    fail(Errc::ParseFailure, std::string("manifest is not valid JSON: ") + e.what());
  }

  // Judgments-only mode: counts are given, nothing is searched.
  if (doc.is_object() && doc.contains("judgments")) {
    if (!doc["judgments"].is_array()) fail(Errc::ParseFailure, "\"judgments\" must be an array");
    std::vector<QueryJudgment> judgments;
    std::size_t n = 0;
    for (const json& e : doc["judgments"]) {
      const std::string where = "judgment " + std::to_string(++n);
      if (!e.is_object()) fail(Errc::ParseFailure, where + ": expected an object");
      QueryJudgment j;
      j.query_name = e.contains("query") ? field<std::string>(e, "query", where) : where;
      j.relevant_retrieved = field<std::size_t>(e, "matched", where);
      j.total_retrieved = field<std::size_t>(e, "retrieved", where);
      j.total_relevant_available = field<std::size_t>(e, "available", where);
      judgments.push_back(std::move(j));
    }
    return report_from_judgments(judgments);
  }

  const json* entries = &doc;
  if (doc.is_object()) {
    if (!doc.contains("queries")) fail(Errc::ParseFailure, "manifest needs \"queries\" or \"judgments\"");
    entries = &doc["queries"];
  }
  if (!entries->is_array()) fail(Errc::ParseFailure, "manifest queries must be an array");

  const fs::path base = fs::path(a.manifest).parent_path();
  std::vector<LabeledQuery> queries;
  std::size_t n = 0;
  for (const json& e : *entries) {
    const std::string where = "query " + std::to_string(++n);
    if (!e.is_object()) fail(Errc::ParseFailure, where + ": expected an object");
    LabeledQuery q;
    fs::path dir = field<std::string>(e, "frames_dir", where);
    if (dir.is_relative()) dir = base / dir;
    q.name = e.contains("name") ? field<std::string>(e, "name", where) : dir.filename().string();
    for (VideoId id : field<std::vector<VideoId>>(e, "relevant", where)) q.relevant.insert(id);
    q.frames = load_frames(ctx, dir.string(), true);
    queries.push_back(std::move(q));
  }
  if (queries.empty()) return {};

  auto catalog = open_catalog(ctx);
  BenchmarkOptions options;
  options.search.k = a.k;
  options.search.min_candidates = a.min_candidates;
  options.search.max_distance = a.max_distance;
  options.parallel = a.parallel;
  return run_benchmark(*catalog->snapshot(), queries, options);
}

int cmd_eval(Context& ctx, const EvalArgs& a) {
  const BenchmarkReport report = eval_manifest(ctx, a);
  ctx.out << render_text(report);
  ctx.err << render_timings(report);
  if (!a.csv.empty()) write_text(a.csv, render_csv(report));
  if (!a.json_out.empty()) write_text(a.json_out, render_json(report));
  return kExitOk;
}

// ---- motion ---------------------------------------------------------------

struct MotionArgs {
  std::string sketch;
};

int cmd_motion(Context& ctx, const MotionArgs& a) {
  const Trajectory query = parse_sketch(read_text(a.sketch));
  validate_trajectory(query);
  auto catalog = open_catalog(ctx);
  const auto snap = catalog->snapshot();
  std::vector<MotionCandidate> candidates;
  for (const auto& [id, v] : snap->videos()) {
    if (v.trajectory) candidates.push_back({id, *v.trajectory});
  }
  const auto matches = motion_rank(query, candidates);
  if (matches.empty()) {
    ctx.out << "no results\n";
    return kExitOk;
  }
  ctx.out << "rank\tv_id\tname\tscore\n";
  std::size_t rank = 0;
  for (const MotionMatch& m : matches) {
    ctx.out << ++rank << "\t" << m.v_id << "\t" << snap->video(m.v_id).v_name << "\t" << fixed6(m.score)
            << "\n";
  }
  return kExitOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string addr;
  std::string cors_origin;
  std::string staging;
};

int cmd_serve(Context& ctx, const ServeArgs& a) {
  if (!a.addr.empty()) ::setenv("CLIPSEEK_ADDR", a.addr.c_str(), 1);
  ServiceConfig config = config_from_env();
  if (!a.cors_origin.empty()) config.cors_origin = a.cors_origin;
  if (!a.staging.empty()) config.staging_root = a.staging;
  auto catalog = open_catalog(ctx);
  Service service(*catalog, config);
  const int port = service.bind();
  if (port < 0) fail(Errc::Io, "cannot bind " + config.host + ":" + std::to_string(config.port));
  ctx.err << "listening on " << config.host << ":" << port << "\n";
  ctx.err.flush();
  return service.listen() ? kExitOk : kExitInternal;
}

// ---- seed-corpus ----------------------------------------------------------

struct SeedArgs {
  std::string out;
  std::string kind = "colors";
  std::size_t count = 10;
  std::uint64_t seed = 1;
  bool register_videos = false;
};

int cmd_seed(Context& ctx, const SeedArgs& a) {
  const fs::path root = a.out;
  std::unique_ptr<Catalog> catalog;
  if (a.register_videos) catalog = open_catalog(ctx);
  auto emit = [&](const corpus::SyntheticVideo& v, const fs::path& dir) -> std::optional<VideoId> {
    corpus::write_frames(v, dir);
    ctx.out << dir.string() << "\n";
    if (!catalog) return std::nullopt;
    return catalog->register_video(v.name, corpus::to_frame_seq(v)).video.v_id;
  };

  if (a.kind == "colors") {
    json queries = json::array();
    for (std::size_t c = 0; c < corpus::kClassColors.size(); ++c) {
      json relevant = json::array();
      for (std::size_t i = 0; i < a.count; ++i) {
        const auto v = corpus::color_class_video(c, a.seed + i);
        if (auto id = emit(v, root / "videos" / v.name)) relevant.push_back(*id);
      }
      const auto held_out = corpus::color_class_video(c, a.seed + a.count);
      const fs::path qdir = root / "queries" / corpus::kClassNames[c];
      corpus::write_frames(held_out, qdir);
      queries.push_back({{"name", corpus::kClassNames[c]},
                         {"frames_dir", fs::path("queries") / corpus::kClassNames[c]},
                         {"relevant", relevant}});
    }
    if (catalog) write_text(root / "manifest.json", json{{"queries", queries}}.dump(2) + "\n");
  } else if (a.kind == "squares") {
    fs::create_directories(root / "sketches");
    for (corpus::Direction d : corpus::kAllDirections) {
      const auto v = corpus::moving_square(d);
      emit(v, root / "videos" / v.name);
      write_text(root / "sketches" / (std::string(corpus::direction_name(d)) + ".json"),
                 sketch_to_json(corpus::direction_sketch(d)) + "\n");
    }
  } else if (a.kind == "random") {
    for (std::size_t i = 0; i < a.count; ++i) {
      const auto v = corpus::random_video(a.seed + i);
      emit(v, root / "videos" / v.name);
    }
  } else {
    fail(Errc::InvalidArgument, "unknown corpus kind '" + a.kind + "'");
  }
  return kExitOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Io:
    case Errc::StorageFull:
    case Errc::CorruptJournal:
      return kExitInternal;
    default:
      return kExitValidation;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const char* env_catalog = std::getenv("CLIPSEEK_CATALOG");
  Context ctx{out, err, env_catalog && *env_catalog ? env_catalog : "catalog"};

  CLI::App app{"clipseek: content-based video retrieval"};
  app.require_subcommand(1);
  app.add_option("--catalog", ctx.catalog_root, "Catalog directory (default $CLIPSEEK_CATALOG or ./catalog)");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Select keyframes of a frame directory");
  c_ingest->add_option("--frames", ingest.frames, "Frame directory")->required();
  c_ingest->add_option("--threshold", ingest.threshold, "Keyframe distance threshold");

  RegisterArgs reg;
  auto* c_register = app.add_subcommand("register", "Register a video from a frame directory");
  c_register->add_option("--name", reg.name, "Video name")->required();
  c_register->add_option("--frames", reg.frames, "Frame directory")->required();
  c_register->add_option("--threshold", reg.threshold, "Keyframe distance threshold");
  c_register->add_option("--max-frames", reg.max_frames, "Frame count cap");

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "Rank catalog videos against a query clip");
  c_search->add_option("--frames", search.frames, "Query frame directory")->required();
  c_search->add_option("--k", search.k, "Result count")->check(CLI::PositiveNumber);
  c_search->add_option("--min-candidates", search.min_candidates, "Candidate floor per query keyframe");
  c_search->add_option("--max-distance", search.max_distance, "Drop results farther than this")
      ->check(CLI::NonNegativeNumber);
  c_search->add_option("--threshold", search.threshold, "Keyframe distance threshold");
  c_search->add_flag("--exhaustive", search.exhaustive, "Compare every stored keyframe");
  c_search->add_flag("--mean-of-best", search.mean_of_best, "Average best distance per query keyframe");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Precision/recall over a labelled query manifest");
  c_eval->add_option("--queries", eval.manifest, "Manifest JSON")->required();
  c_eval->add_option("--k", eval.k, "Result count")->check(CLI::PositiveNumber);
  c_eval->add_option("--min-candidates", eval.min_candidates, "Candidate floor per query keyframe");
  c_eval->add_option("--max-distance", eval.max_distance, "Drop results farther than this")
      ->check(CLI::NonNegativeNumber);
  c_eval->add_option("--csv", eval.csv, "Write per-query CSV here");
  c_eval->add_option("--json", eval.json_out, "Write the JSON report here");
  c_eval->add_flag("--parallel", eval.parallel, "Run queries concurrently (timings become unreliable)");

  MotionArgs motion;
  auto* c_motion = app.add_subcommand("motion", "Rank videos by motion against a sketch");
  c_motion->add_option("--sketch", motion.sketch, "Sketch JSON file")->required();

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP service");
  c_serve->add_option("--addr", serve.addr, "host:port (default $CLIPSEEK_ADDR or 127.0.0.1:8080)");
  c_serve->add_option("--cors-origin", serve.cors_origin, "Allowed CORS origin");
  c_serve->add_option("--staging", serve.staging, "Upload staging directory");

  SeedArgs seed;
  auto* c_seed = app.add_subcommand("seed-corpus", "");
  c_seed->group("");
  c_seed->add_option("--out", seed.out, "Output directory")->required();
  c_seed->add_option("--kind", seed.kind, "colors | squares | random");
  c_seed->add_option("--count", seed.count, "Videos per class, or total for random");
  c_seed->add_option("--seed", seed.seed, "First seed");
  c_seed->add_flag("--register", seed.register_videos, "Also register into the catalog");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ctx, ingest);
    if (c_register->parsed()) return cmd_register(ctx, reg);
    if (c_search->parsed()) return cmd_search(ctx, search);
    if (c_eval->parsed()) return cmd_eval(ctx, eval);
    if (c_motion->parsed()) return cmd_motion(ctx, motion);
    if (c_serve->parsed()) return cmd_serve(ctx, serve);
    if (c_seed->parsed()) return cmd_seed(ctx, seed);
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace clipseek::cli
