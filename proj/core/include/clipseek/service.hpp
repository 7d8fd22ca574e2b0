#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "clipseek/catalog.hpp"
#include "clipseek/error.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/retrieval.hpp"

namespace clipseek {

/// Reads {"points": [[x, y], ...]} or a bare [[x, y], ...] array. Throws
/// ParseFailure for malformed JSON; coordinates are not range-checked here.
Trajectory parse_sketch(std::string_view json);
std::string sketch_to_json(const Trajectory& t);

/// HTTP status for an error kind.
int http_status(Errc code) noexcept;

struct MultipartField {
  std::string filename;
  std::string content;
};

/// Transport-neutral request; the socket adapter fills it from the wire.
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, MultipartField> fields;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> cors_origin;
  /// Uploads are unpacked below this directory and removed afterwards.
  std::filesystem::path staging_root;
  std::size_t max_upload_bytes = std::size_t{512} << 20;
  RegistrationConfig registration;
  SearchOptions search;
};

/// Reads CLIPSEEK_ADDR ("host:port") and CLIPSEEK_CORS_ORIGIN over `base`.
/// Throws InvalidArgument for an unparsable address.
ServiceConfig config_from_env(ServiceConfig base = {});

/**
 * Routes:
 *   POST /videos                 multipart name + archive   -> 201 summary
 *   GET  /videos?limit&offset                               -> listing
 *   GET  /videos/{id}                                       -> detail
 *   POST /search                 multipart archive, k, max_distance
 *   POST /search/motion          {"points": [[x, y], ...]}
 *   GET  /keyframes/{id}/image                              -> PGM bytes
 * Errors are {"code", "message"} with the status from http_status().
 */
class Service {
 public:
  Service(Catalog& catalog, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle(const HttpRequest& request);

  /// Binds the configured address; port 0 picks a free port. Returns the
  /// bound port or -1.
  int bind();
  /// Serves until stop(). Call after bind().
  bool listen();
  void stop();

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  HttpResponse dispatch(const HttpRequest& request);
  HttpResponse post_video(const HttpRequest& request);
  HttpResponse list_videos(const HttpRequest& request);
  HttpResponse get_video(VideoId id);
  HttpResponse search_clip(const HttpRequest& request);
  HttpResponse search_motion(const HttpRequest& request);
  HttpResponse keyframe_image(KeyframeId id);
  std::filesystem::path make_staging_dir();

  struct Server;

  Catalog& catalog_;
  ServiceConfig config_;
  std::atomic<std::uint64_t> staging_counter_{0};
  std::unique_ptr<Server> server_;
};

}  // namespace clipseek
