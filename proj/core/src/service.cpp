#include "clipseek/service.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "clipseek/archive.hpp"
#include "clipseek/keyframe.hpp"

namespace clipseek {

using json = nlohmann::ordered_json;

struct Service::Server {
  httplib::Server http;
};

namespace {

constexpr std::size_t kDefaultPageSize = 50;
constexpr std::size_t kMaxPageSize = 1000;

HttpResponse json_response(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  return r;
}

HttpResponse error_response(Errc code, const std::string& message) {
  return json_response(http_status(code), {{"code", errc_name(code)}, {"message", message}});
}

std::string thumbnail_url(KeyframeId id) { return "/keyframes/" + std::to_string(id) + "/image"; }

json video_summary(const VideoRecord& v) {
  return {
      {"v_id", v.v_id},
      {"name", v.v_name},
      {"frame_count", v.frame_count},
      {"keyframe_count", v.keyframe_ids.size()},
      {"has_trajectory", v.trajectory.has_value()},
      {"dostore", v.dostore},
  };
}

json trajectory_points(const Trajectory& t) {
  json points = json::array();
  for (const Point2& p : t.points) points.push_back({p.x, p.y});
  return points;
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Form field, else query parameter.
std::optional<std::string> param(const HttpRequest& req, const std::string& key) {
  if (auto f = req.fields.find(key); f != req.fields.end()) return f->second.content;
  if (auto q = req.query.find(key); q != req.query.end()) return q->second;
  return std::nullopt;
}

std::size_t count_param(const HttpRequest& req, const std::string& key, std::size_t fallback) {
  const auto raw = param(req, key);
  if (!raw) return fallback;
  const auto v = parse_number<std::size_t>(*raw);
  if (!v) fail(Errc::InvalidArgument, key + " must be a non-negative integer");
  return *v;
}

const MultipartField& archive_field(const HttpRequest& req) {
  for (const char* key : {"archive", "frames", "file"}) {
    if (auto it = req.fields.find(key); it != req.fields.end()) return it->second;
  }
  fail(Errc::EmptyArchive, "no archive field in upload");
}

// Removes the directory on scope exit.
class StagingDir {
 public:
  explicit StagingDir(std::filesystem::path p) : path_(std::move(p)) {}
  ~StagingDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

FrameSeq ingest_upload(const MultipartField& upload, const StagingDir& staging, std::size_t limit,
                       bool keep_pixels) {
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(upload.content.data()),
                                            upload.content.size());
  extract_archive(bytes, staging.path(), limit);
  try {
    return ingest_frames(staging.path(), nullptr, keep_pixels);
  } catch (const Error& e) {
    if (e.code() == Errc::EmptyDirectory) fail(Errc::NoDecodableFrames, "archive holds no frame images");
    throw;
  }
}

}  // namespace

Trajectory parse_sketch(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::ParseFailure, std::string("sketch is not valid JSON: ") + e.what());
  }
  const json* points = &doc;
  if (doc.is_object()) {
    if (!doc.contains("points")) fail(Errc::ParseFailure, "sketch object has no \"points\"");
    points = &doc["points"];
  }
  if (!points->is_array()) fail(Errc::ParseFailure, "sketch points must be an array");
  Trajectory t;
  t.source = TrajectorySource::Sketch;
  for (const json& p : *points) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(Errc::ParseFailure, "each sketch point must be [x, y]");
    }
    t.points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return t;
}

std::string sketch_to_json(const Trajectory& t) { return json{{"points", trajectory_points(t)}}.dump(); }

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::NotFound:
      return 404;
    case Errc::NoDecodableFrames:
    case Errc::EmptyDirectory:
      return 422;
    case Errc::StorageFull:
    case Errc::CorruptJournal:
    case Errc::Io:
      return 500;
    default:
      return 400;
  }
}

ServiceConfig config_from_env(ServiceConfig base) {
  if (const char* addr = std::getenv("CLIPSEEK_ADDR"); addr && *addr) {
    const std::string s(addr);
    const auto colon = s.rfind(':');
    const auto port = colon == std::string::npos ? std::nullopt : parse_number<int>(s.substr(colon + 1));
    if (!port || *port < 0 || *port > 65535 || colon == 0) {
      fail(Errc::InvalidArgument, "CLIPSEEK_ADDR must be host:port, got '" + s + "'");
    }
    base.host = s.substr(0, colon);
    base.port = *port;
  }
  if (const char* origin = std::getenv("CLIPSEEK_CORS_ORIGIN"); origin && *origin) {
    base.cors_origin = origin;
  }
  return base;
}

Service::Service(Catalog& catalog, ServiceConfig config)
    : catalog_(catalog), config_(std::move(config)), server_(std::make_unique<Server>()) {
  if (config_.staging_root.empty()) {
    config_.staging_root = std::filesystem::temp_directory_path() / "clipseek-staging";
  }

  auto adapter = [this](const httplib::Request& in, httplib::Response& out) {
    HttpRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, f] : in.files) req.fields.emplace(k, MultipartField{f.filename, f.content});
    req.body = in.body;
    HttpResponse res = handle(req);
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    out.set_content(res.body, res.content_type);
  };
  auto& http = server_->http;
  http.set_payload_max_length(config_.max_upload_bytes);
  http.Get(".*", adapter);
  http.Post(".*", adapter);
  http.Options(".*", adapter);
  http.Put(".*", adapter);
  http.Delete(".*", adapter);
}

Service::~Service() { stop(); }

int Service::bind() {
  auto& http = server_->http;
  if (config_.port == 0) return http.bind_to_any_port(config_.host);
  return http.bind_to_port(config_.host, config_.port) ? config_.port : -1;
}

bool Service::listen() { return server_->http.listen_after_bind(); }

void Service::stop() {
  if (server_) server_->http.stop();
}

HttpResponse Service::handle(const HttpRequest& request) {
  HttpResponse res;
  try {
    res = dispatch(request);
  } catch (const Error& e) {
    res = error_response(e.code(), e.what());
  } catch (const std::exception&) {
    res = json_response(500, {{"code", "Internal"}, {"message", "internal error"}});
  }
  if (config_.cors_origin) {
    res.headers["Access-Control-Allow-Origin"] = *config_.cors_origin;
    res.headers["Vary"] = "Origin";
  }
  return res;
}

HttpResponse Service::dispatch(const HttpRequest& req) {
  if (req.method == "OPTIONS") {
    HttpResponse r;
    r.status = 204;
    r.content_type = "text/plain";
    r.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
    r.headers["Access-Control-Allow-Headers"] = "Content-Type";
    return r;
  }

  std::vector<std::string> parts;
  std::stringstream ss(req.path);
  for (std::string seg; std::getline(ss, seg, '/');) {
    if (!seg.empty()) parts.push_back(seg);
  }
  auto id_at = [&](std::size_t i) {
    const auto id = parse_number<std::int64_t>(parts[i]);
    if (!id) fail(Errc::NotFound, "no such resource " + req.path);
    return *id;
  };

  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  if (parts.size() == 1 && parts[0] == "videos") {
    if (post) return post_video(req);
    if (get) return list_videos(req);
  } else if (parts.size() == 2 && parts[0] == "videos" && get) {
    return get_video(id_at(1));
  } else if (parts.size() == 1 && parts[0] == "search" && post) {
    return search_clip(req);
  } else if (parts.size() == 2 && parts[0] == "search" && parts[1] == "motion" && post) {
    return search_motion(req);
  } else if (parts.size() == 3 && parts[0] == "keyframes" && parts[2] == "image" && get) {
    return keyframe_image(id_at(1));
  }
  fail(Errc::NotFound, "no route for " + req.method + " " + req.path);
}

std::filesystem::path Service::make_staging_dir() {
  const auto n = staging_counter_.fetch_add(1);
  return config_.staging_root / ("upload-" + std::to_string(::getpid()) + "-" + std::to_string(n));
}

HttpResponse Service::post_video(const HttpRequest& req) {
  const auto name = param(req, "name");
  if (!name || name->empty()) fail(Errc::InvalidArgument, "name is required");
  if (name->size() > kVideoNameCapacity) {
    fail(Errc::NameTooLong, "name exceeds " + std::to_string(kVideoNameCapacity) + " bytes");
  }
  const MultipartField& upload = archive_field(req);
  StagingDir staging(make_staging_dir());
  const FrameSeq frames = ingest_upload(upload, staging, config_.max_upload_bytes, false);
  const Registration reg = catalog_.register_video(*name, frames, config_.registration);
  json body = video_summary(reg.video);
  return json_response(201, body);
}

HttpResponse Service::list_videos(const HttpRequest& req) {
  const std::size_t limit = std::min(count_param(req, "limit", kDefaultPageSize), kMaxPageSize);
  const std::size_t offset = count_param(req, "offset", 0);
  const auto snap = catalog_.snapshot();
  json videos = json::array();
  std::size_t index = 0;
  for (const auto& [id, v] : snap->videos()) {
    if (index++ < offset) continue;
    if (videos.size() >= limit) break;
    videos.push_back(video_summary(v));
  }
  return json_response(200, {{"videos", videos}, {"total", snap->videos().size()}});
}

HttpResponse Service::get_video(VideoId id) {
  const auto snap = catalog_.snapshot();
  const VideoRecord& v = snap->video(id);
  json body = video_summary(v);
  json keyframes = json::array();
  for (KeyframeId kid : v.keyframe_ids) {
    const KeyframeRecord& kf = snap->keyframe(kid);
    keyframes.push_back({
        {"i_id", kf.i_id},
        {"i_name", kf.i_name},
        {"min", kf.min},
        {"max", kf.max},
        {"majorregions", kf.majorregions},
        {"thumbnail_url", thumbnail_url(kf.i_id)},
    });
  }
  body["keyframes"] = keyframes;
  body["trajectory"] = v.trajectory ? trajectory_points(*v.trajectory) : json(nullptr);
  return json_response(200, body);
}

HttpResponse Service::search_clip(const HttpRequest& req) {
  SearchOptions options = config_.search;
  options.k = count_param(req, "k", options.k);
  if (options.k == 0) fail(Errc::InvalidArgument, "k must be positive");
  if (const auto raw = param(req, "max_distance"); raw && !raw->empty()) {
    const auto d = parse_number<double>(*raw);
    if (!d || !std::isfinite(*d) || *d < 0) fail(Errc::InvalidArgument, "max_distance must be a non-negative number");
    options.max_distance = d;
  }
  const MultipartField& upload = archive_field(req);
  StagingDir staging(make_staging_dir());
  const FrameSeq frames = ingest_upload(upload, staging, config_.max_upload_bytes, true);

  const auto snap = catalog_.snapshot();
  const RankedResult result = search_by_clip(*snap, frames, options);
  json results = json::array();
  for (const RankedEntry& e : result.entries) {
    results.push_back({
        {"v_id", e.v_id},
        {"v_name", snap->video(e.v_id).v_name},
        {"distance", e.distance},
        {"thumbnail_url", thumbnail_url(e.best_catalog_kf)},
    });
  }
  return json_response(200, {
                                {"results", results},
                                {"timings",
                                 {{"retrieval_ms", result.timings.retrieval_s * 1000.0},
                                  {"matching_ms", result.timings.matching_s * 1000.0}}},
                            });
}

HttpResponse Service::search_motion(const HttpRequest& req) {
  const Trajectory query = parse_sketch(req.body);
  validate_trajectory(query);
  const auto snap = catalog_.snapshot();
  std::vector<MotionCandidate> candidates;
  for (const auto& [id, v] : snap->videos()) {
    if (v.trajectory) candidates.push_back({id, *v.trajectory});
  }
  json results = json::array();
  for (const MotionMatch& m : motion_rank(query, candidates)) {
    results.push_back({{"v_id", m.v_id}, {"v_name", snap->video(m.v_id).v_name}, {"score", m.score}});
  }
  return json_response(200, {{"results", results}});
}

HttpResponse Service::keyframe_image(KeyframeId id) {
  const auto snap = catalog_.snapshot();
  snap->keyframe(id);
  std::ifstream f(snap->blob_path(id), std::ios::binary);
  if (!f) fail(Errc::NotFound, "image for keyframe " + std::to_string(id) + " is missing");
  HttpResponse r;
  r.content_type = "image/x-portable-graymap";
  r.body.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  return r;
}

}  // namespace clipseek
