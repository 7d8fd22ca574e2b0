#include "clipseek/catalog.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "clipseek/error.hpp"

namespace clipseek {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kJournalName = "journal.ndjson";
constexpr const char* kMetaName = "meta";
constexpr const char* kScalingName = "scaling.json";
constexpr const char* kLockName = ".lock";
constexpr const char* kBlobDir = "blobs";

[[noreturn]] void fail_errno(const std::string& what, int err) {
  if (err == ENOSPC || err == EDQUOT) {
    fail(Errc::StorageFull, what + ": " + std::strerror(err));
  }
  fail(Errc::Io, what + ": " + std::strerror(err));
}

class FileDescriptor {
 public:
  explicit FileDescriptor(int fd) : fd_(fd) {}
  ~FileDescriptor() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileDescriptor(const FileDescriptor&) = delete;
  FileDescriptor& operator=(const FileDescriptor&) = delete;
  int get() const noexcept { return fd_; }

 private:
  int fd_;
};

void write_all(int fd, const void* data, std::size_t size, const fs::path& path) {
  const auto* p = static_cast<const char*>(data);
  while (size > 0) {
    const ssize_t n = ::write(fd, p, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno("write " + path.string(), errno);
    }
    p += n;
    size -= static_cast<std::size_t>(n);
  }
}

// Writes `bytes` to `path` and fsyncs before returning.
void write_synced(const fs::path& path, std::string_view bytes) {
  FileDescriptor fd(::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (fd.get() < 0) fail_errno("open " + path.string(), errno);
  write_all(fd.get(), bytes.data(), bytes.size(), path);
  if (::fsync(fd.get()) != 0) fail_errno("fsync " + path.string(), errno);
}

void sync_directory(const fs::path& dir) {
  FileDescriptor fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (fd.get() >= 0) ::fsync(fd.get());
}

void replace_synced(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_synced(tmp, bytes);
  if (::rename(tmp.c_str(), path.c_str()) != 0) fail_errno("rename " + tmp.string(), errno);
  sync_directory(path.parent_path());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Exclusive advisory lock across processes for the duration of a commit.
class WriterLock {
 public:
  explicit WriterLock(const fs::path& path)
      : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_.get() < 0) fail_errno("open " + path.string(), errno);
    while (::flock(fd_.get(), LOCK_EX) != 0) {
      if (errno != EINTR) fail_errno("flock " + path.string(), errno);
    }
  }
  ~WriterLock() { ::flock(fd_.get(), LOCK_UN); }

 private:
  FileDescriptor fd_;
};

std::string header_line() {
  return json{{"format", std::string(kCatalogFormat)}}.dump() + "\n";
}

// Cuts at a byte limit without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string s, std::size_t limit) {
  if (s.size() <= limit) return s;
  std::size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  s.resize(cut);
  return s;
}

// --- record (de)serialisation ----------------------------------------------

json trajectory_to_json(const std::optional<Trajectory>& t) {
  if (!t) return nullptr;
  json pts = json::array();
  for (const Point2& p : t->points) pts.push_back({p.x, p.y});
  return pts;
}

json keyframe_to_json(const KeyframeRecord& kf) {
  return json{{"i_id", kf.i_id},         {"i_name", kf.i_name},
              {"image_path", kf.image_path},  {"min", kf.min},
              {"max", kf.max},           {"sch", kf.sch},
              {"glcm", kf.glcm},         {"edgedensity", kf.edgedensity},
              {"majorregions", kf.majorregions}, {"v_id", kf.v_id}};
}

std::string registration_line(const Registration& reg) {
  const VideoRecord& v = reg.video;
  json kfs = json::array();
  for (const KeyframeRecord& kf : reg.keyframes) kfs.push_back(keyframe_to_json(kf));
  json line{{"kind", "video"},
            {"v_id", v.v_id},
            {"v_name", v.v_name},
            {"frame_dir", v.frame_dir},
            {"frame_count", v.frame_count},
            {"keyframe_threshold", v.keyframe_threshold},
            {"keyframe_ids", v.keyframe_ids},
            {"trajectory", trajectory_to_json(v.trajectory)},
            {"dostore", v.dostore},
            {"keyframes", std::move(kfs)}};
  return line.dump() + "\n";
}

// Throws ParseFailure with a reason on any schema violation.
Registration parse_registration(std::string_view text) {
  json line;
  try {
    line = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::ParseFailure, std::string("not JSON: ") + e.what());
  }
  try {
    if (line.at("kind").get<std::string>() != "video") {
      fail(Errc::ParseFailure, "unknown record kind");
    }
    Registration reg;
    VideoRecord& v = reg.video;
    v.v_id = line.at("v_id").get<VideoId>();
    v.v_name = line.at("v_name").get<std::string>();
    v.frame_dir = line.at("frame_dir").get<std::string>();
    v.frame_count = line.at("frame_count").get<std::size_t>();
    v.keyframe_threshold = line.at("keyframe_threshold").get<double>();
    v.keyframe_ids = line.at("keyframe_ids").get<std::vector<KeyframeId>>();
    v.dostore = line.at("dostore").get<std::string>();
    const json& traj = line.at("trajectory");
    if (!traj.is_null()) {
      Trajectory t;
      t.source = TrajectorySource::Derived;
      for (const json& p : traj) {
        if (!p.is_array() || p.size() != 2) fail(Errc::ParseFailure, "bad trajectory point");
        t.points.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      v.trajectory = std::move(t);
    }
    for (const json& k : line.at("keyframes")) {
      KeyframeRecord kf;
      kf.i_id = k.at("i_id").get<KeyframeId>();
      kf.i_name = k.at("i_name").get<std::string>();
      kf.image_path = k.at("image_path").get<std::string>();
      kf.min = k.at("min").get<int>();
      kf.max = k.at("max").get<int>();
      kf.sch = k.at("sch").get<std::string>();
      kf.glcm = k.at("glcm").get<std::string>();
      kf.edgedensity = k.at("edgedensity").get<std::string>();
      kf.majorregions = k.at("majorregions").get<int>();
      kf.v_id = k.at("v_id").get<VideoId>();
      reg.keyframes.push_back(std::move(kf));
    }
    return reg;
  } catch (const json::exception& e) {
    fail(Errc::ParseFailure, std::string("schema: ") + e.what());
  }
}

void validate_registration(const Registration& reg, const CatalogSnapshot& into,
                           const fs::path& root) {
  const VideoRecord& v = reg.video;
  auto bad = [](const std::string& why) { fail(Errc::ParseFailure, why); };
  if (v.v_id <= 0) bad("v_id must be positive");
  if (into.videos().contains(v.v_id)) bad("duplicate v_id " + std::to_string(v.v_id));
  if (v.v_name.empty()) bad("empty v_name");
  if (v.v_name.size() > kVideoNameCapacity) bad("v_name exceeds 60 chars");
  if (v.trajectory) validate_trajectory(*v.trajectory);
  if (v.keyframe_ids.size() != reg.keyframes.size()) bad("keyframe_ids do not match keyframes");
  std::set<KeyframeId> seen;
  for (std::size_t i = 0; i < reg.keyframes.size(); ++i) {
    const KeyframeRecord& kf = reg.keyframes[i];
    if (kf.i_id <= 0) bad("i_id must be positive");
    if (kf.i_id != v.keyframe_ids[i]) bad("keyframe_ids do not match keyframes");
    if (into.keyframes().contains(kf.i_id) || !seen.insert(kf.i_id).second) {
      bad("duplicate i_id " + std::to_string(kf.i_id));
    }
    if (kf.image_path != std::string(kBlobDir) + "/" + std::to_string(kf.i_id) + ".pgm") {
      bad("unexpected image path " + kf.image_path);
    }
    if (kf.v_id != v.v_id) bad("keyframe " + std::to_string(kf.i_id) + " names another video");
    if (kf.i_name.empty() || kf.i_name.size() > kKeyframeNameCapacity) bad("bad i_name length");
    if (!kf.bucket().is_valid()) bad("min/max is not a range-tree node");
    if (kf.sch.size() > kSchCapacity) bad("sch exceeds 1500 chars");
    if (kf.edgedensity.size() > kEdgeCapacity) bad("edgedensity exceeds 250 chars");
    if (kf.majorregions < 0) bad("negative majorregions");
    if (!fs::exists(root / kf.image_path)) bad("missing keyframe image " + kf.image_path);
  }
}

json scaling_to_json(const ScalingStats& s) {
  return json{{"glcm_min", s.glcm_min},
              {"glcm_max", s.glcm_max},
              {"regions_max", s.regions_max},
              {"samples", s.samples}};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

KeyframeFeatures parse_features(const KeyframeRecord& kf, int glcm_step) {
  KeyframeFeatures f;
  f.sch = parse_histogram(kf.sch);
  f.glcm = parse_glcm(kf.glcm, glcm_step);
  f.edges = parse_edges(kf.edgedensity);
  f.major_regions = kf.majorregions;
  return f;
}

// --- snapshot ----------------------------------------------------------------

const VideoRecord& CatalogSnapshot::video(VideoId id) const {
  auto it = videos_.find(id);
  if (it == videos_.end()) fail(Errc::NotFound, "no video with id " + std::to_string(id));
  return it->second;
}

const KeyframeRecord& CatalogSnapshot::keyframe(KeyframeId id) const {
  auto it = keyframes_.find(id);
  if (it == keyframes_.end()) fail(Errc::NotFound, "no keyframe with id " + std::to_string(id));
  return it->second;
}

const KeyframeFeatures& CatalogSnapshot::features(KeyframeId id) const {
  auto it = features_.find(id);
  if (it == features_.end()) fail(Errc::NotFound, "no keyframe with id " + std::to_string(id));
  return it->second;
}

const FeatureVector& CatalogSnapshot::vector(KeyframeId id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) fail(Errc::NotFound, "no keyframe with id " + std::to_string(id));
  return it->second;
}

fs::path CatalogSnapshot::blob_path(KeyframeId id) const {
  return root_ / keyframe(id).image_path;
}

VideoId CatalogSnapshot::next_video_id() const noexcept {
  return videos_.empty() ? 1 : videos_.rbegin()->first + 1;
}

KeyframeId CatalogSnapshot::next_keyframe_id() const noexcept {
  return keyframes_.empty() ? 1 : keyframes_.rbegin()->first + 1;
}

void CatalogSnapshot::add(const Registration& reg, const KeyframeFeatures* features) {
  for (std::size_t i = 0; i < reg.keyframes.size(); ++i) {
    const KeyframeRecord& kf = reg.keyframes[i];
    features_.emplace(kf.i_id, features ? features[i] : parse_features(kf));
  }
  for (const KeyframeRecord& kf : reg.keyframes) {
    buckets_.insert(kf.i_id, kf.bucket());
    keyframes_.emplace(kf.i_id, kf);
  }
  videos_.emplace(reg.video.v_id, reg.video);
}

void CatalogSnapshot::finalize() {
  std::vector<KeyframeFeatures> all;
  all.reserve(features_.size());
  for (const auto& [id, f] : features_) all.push_back(f);
  scaling_ = compute_scaling(all);
  vectors_.clear();
  for (const auto& [id, f] : features_) vectors_.emplace(id, build_vector(f, scaling_));
}

// --- catalog -----------------------------------------------------------------

Catalog::Catalog(fs::path root, LoadReport* report) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / kBlobDir, ec);
  if (ec) fail(Errc::Io, "cannot create catalog at " + root_.string() + ": " + ec.message());

  const fs::path meta = root_ / kMetaName;
  const fs::path journal = root_ / kJournalName;
  if (!fs::exists(meta) && !fs::exists(journal)) {
    WriterLock lock(root_ / kLockName);
    if (!fs::exists(journal)) {
      replace_synced(journal, header_line());
      replace_synced(meta, std::string(kCatalogFormat) + "\n");
    }
  }
  current_ = load(report);
}

std::shared_ptr<CatalogSnapshot> Catalog::load(LoadReport* report) const {
  const fs::path meta = root_ / kMetaName;
  if (fs::exists(meta)) {
    std::string version = read_file(meta);
    while (!version.empty() && (version.back() == '\n' || version.back() == '\r')) version.pop_back();
    if (version != kCatalogFormat) {
      fail(Errc::CorruptJournal, "unsupported catalog format '" + version + "'");
    }
  }

  const fs::path journal = root_ / kJournalName;
  std::string content = fs::exists(journal) ? read_file(journal) : header_line();

  auto snap = std::make_shared<CatalogSnapshot>();
  snap->root_ = root_;
  snap->journal_bytes_ = content.size();

  std::istringstream lines(content);
  std::string line;
  if (!std::getline(lines, line)) fail(Errc::CorruptJournal, "journal has no header");
  try {
    const json header = json::parse(line);
    if (header.at("format").get<std::string>() != kCatalogFormat) {
      fail(Errc::CorruptJournal, "journal format mismatch");
    }
  } catch (const json::exception&) {
    fail(Errc::CorruptJournal, "journal header unreadable");
  }

  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = {};
  std::size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Registration reg = parse_registration(line);
      validate_registration(reg, *snap, root_);
      std::vector<KeyframeFeatures> features;
      for (const KeyframeRecord& kf : reg.keyframes) features.push_back(parse_features(kf));
      snap->add(reg, features.data());
      ++rep.records;
    } catch (const Error& e) {
      rep.quarantined.push_back({line_no, e.what()});
    }
  }
  snap->finalize();
  return snap;
}

std::shared_ptr<const CatalogSnapshot> Catalog::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

Registration Catalog::register_video(std::string_view name, const FrameSeq& frames,
                                     const RegistrationConfig& config) {
  if (name.empty()) fail(Errc::InvalidArgument, "video name must not be empty");
  if (name.size() > kVideoNameCapacity) {
    fail(Errc::NameTooLong, "video name exceeds " + std::to_string(kVideoNameCapacity) + " chars");
  }
  if (frames.empty()) fail(Errc::EmptySequence, "no frames to register");
  if (frames.size() > config.max_frames) {
    fail(Errc::TooManyFrames, std::to_string(frames.size()) + " frames exceed the cap of " +
                                  std::to_string(config.max_frames));
  }

  const KeyframeSelection selection = extract_keyframes(frames, config.keyframe_threshold);

  Registration reg;
  VideoRecord& video = reg.video;
  video.v_name = std::string(name);
  if (!frames.frames.front().path.empty()) {
    video.frame_dir = frames.frames.front().path.parent_path().string();
  }
  video.frame_count = frames.size();
  video.keyframe_threshold = selection.threshold_used;

  std::vector<KeyframeFeatures> features;
  std::vector<GrayRaster> images;
  std::vector<GrayRaster> thumbs;
  for (std::size_t index : selection.indices) {
    const Frame& frame = frames.frames[index];
    const RgbRaster pixels = load_pixels(frame);
    KeyframeFeatures f = featurize(pixels, config.features);

    KeyframeRecord kf;
    kf.i_name = truncate_utf8(frame.name.empty() ? "frame" + std::to_string(index) : frame.name,
                              kKeyframeNameCapacity);
    const RangeBucket bucket = assign_bucket(gray_histogram(frame.thumb));
    kf.min = bucket.min;
    kf.max = bucket.max;
    kf.sch = serialize_histogram(f.sch);
    kf.glcm = serialize_glcm(f.glcm);
    kf.edgedensity = serialize_edges(f.edges);
    kf.majorregions = f.major_regions;

    reg.keyframes.push_back(std::move(kf));
    features.push_back(f);
    images.push_back(to_gray(pixels));
    thumbs.push_back(frame.thumb);
  }

  try {
    video.trajectory = derive_video_trajectory(thumbs, config.motion_diff_threshold);
  } catch (const Error& e) {
    if (e.code() != Errc::TooFewKeyframes && e.code() != Errc::NoMotion) throw;
  }

  commit(reg, features, images);
  return reg;
}

void Catalog::commit(Registration& reg, const std::vector<KeyframeFeatures>& features,
                     const std::vector<GrayRaster>& images) {
  std::lock_guard writer(writer_mutex_);
  WriterLock lock(root_ / kLockName);

  const fs::path journal = root_ / kJournalName;
  std::shared_ptr<const CatalogSnapshot> base = snapshot();
  std::error_code ec;
  const auto on_disk = fs::file_size(journal, ec);
  if (ec || on_disk != base->journal_bytes_) {
    // Another process committed since we loaded.
    auto fresh = load(nullptr);
    std::lock_guard guard(snapshot_mutex_);
    current_ = fresh;
    base = fresh;
  }

  reg.video.v_id = base->next_video_id();
  reg.video.dostore = utc_timestamp();
  reg.video.keyframe_ids.clear();
  KeyframeId next = base->next_keyframe_id();
  for (KeyframeRecord& kf : reg.keyframes) {
    kf.i_id = next++;
    kf.v_id = reg.video.v_id;
    kf.image_path = std::string(kBlobDir) + "/" + std::to_string(kf.i_id) + ".pgm";
    reg.video.keyframe_ids.push_back(kf.i_id);
  }

  std::vector<fs::path> written;
  const fs::path tmp_journal = fs::path(journal) += ".tmp";
  try {
    for (std::size_t i = 0; i < reg.keyframes.size(); ++i) {
      const auto bytes = encode_pgm(images[i]);
      const fs::path blob = root_ / reg.keyframes[i].image_path;
      write_synced(blob, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      written.push_back(blob);
    }
    sync_directory(root_ / kBlobDir);
    if (fault_ == FaultPoint::AfterBlobs) {
      fault_ = FaultPoint::None;
      throw SimulatedCrash("simulated crash after blob writes");
    }

    std::string content = read_file(journal);
    if (!content.empty() && content.back() != '\n') content += '\n';
    content += registration_line(reg);
    write_synced(tmp_journal, content);
    if (fault_ == FaultPoint::AfterJournalTemp) {
      fault_ = FaultPoint::None;
      throw SimulatedCrash("simulated crash before journal rename");
    }
    if (::rename(tmp_journal.c_str(), journal.c_str()) != 0) {
      fail_errno("rename " + tmp_journal.string(), errno);
    }
    sync_directory(root_);

    auto next_snap = std::make_shared<CatalogSnapshot>(*base);
    next_snap->journal_bytes_ = content.size();
    next_snap->add(reg, features.data());
    next_snap->finalize();
    {
      std::lock_guard guard(snapshot_mutex_);
      current_ = next_snap;
    }
    try {
      replace_synced(root_ / kScalingName, scaling_to_json(next_snap->scaling()).dump(2) + "\n");
    } catch (const Error&) {
      // Stats are recomputed from the journal on open.
    }
  } catch (const SimulatedCrash&) {
    throw;
  } catch (...) {
    for (const fs::path& p : written) fs::remove(p, ec);
    fs::remove(tmp_journal, ec);
    throw;
  }
}

}  // namespace clipseek
