#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clipseek/feature_vector.hpp"
#include "clipseek/features.hpp"
#include "clipseek/keyframe.hpp"
#include "clipseek/motion.hpp"
#include "clipseek/range_index.hpp"

namespace clipseek {

inline constexpr std::string_view kCatalogFormat = "clipseek-catalog/1";
inline constexpr std::size_t kVideoNameCapacity = 60;
inline constexpr std::size_t kKeyframeNameCapacity = 40;
inline constexpr std::size_t kDefaultMaxFrames = 2000;

/// One row of the keyframe table.
struct KeyframeRecord {
  KeyframeId i_id = 0;
  std::string i_name;
  /// Relative to the catalog root, e.g. "blobs/7.pgm".
  std::string image_path;
  int min = 0;
  int max = 255;
  std::string sch;
  std::string glcm;
  std::string edgedensity;
  int majorregions = 0;
  VideoId v_id = 0;

  RangeBucket bucket() const noexcept { return {min, max}; }

  friend bool operator==(const KeyframeRecord&, const KeyframeRecord&) = default;
};

/// One row of the video table.
struct VideoRecord {
  VideoId v_id = 0;
  std::string v_name;
  std::string frame_dir;
  std::size_t frame_count = 0;
  double keyframe_threshold = kDefaultKeyframeThreshold;
  std::vector<KeyframeId> keyframe_ids;
  std::optional<Trajectory> trajectory;
  /// Registration time, ISO-8601 UTC.
  std::string dostore;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct RegistrationConfig {
  double keyframe_threshold = kDefaultKeyframeThreshold;
  FeatureConfig features;
  int motion_diff_threshold = kMotionDiffThreshold;
  std::size_t max_frames = kDefaultMaxFrames;
};

struct Registration {
  VideoRecord video;
  std::vector<KeyframeRecord> keyframes;
};

/// Parses the feature columns of a record. Throws ParseFailure.
KeyframeFeatures parse_features(const KeyframeRecord& kf, int glcm_step = 1);

/// Immutable view of the catalog at one point in time.
class CatalogSnapshot {
 public:
  const std::map<VideoId, VideoRecord>& videos() const noexcept { return videos_; }
  const std::map<KeyframeId, KeyframeRecord>& keyframes() const noexcept { return keyframes_; }
  const BucketTable& buckets() const noexcept { return buckets_; }
  const ScalingStats& scaling() const noexcept { return scaling_; }

  /// Throw NotFound for unknown ids.
  const VideoRecord& video(VideoId id) const;
  const KeyframeRecord& keyframe(KeyframeId id) const;
  const KeyframeFeatures& features(KeyframeId id) const;
  const FeatureVector& vector(KeyframeId id) const;

  std::filesystem::path blob_path(KeyframeId id) const;
  const std::filesystem::path& root() const noexcept { return root_; }

  bool empty() const noexcept { return videos_.empty(); }
  VideoId next_video_id() const noexcept;
  KeyframeId next_keyframe_id() const noexcept;

 private:
  friend class Catalog;

  void add(const Registration& reg, KeyframeFeatures const* features);
  void finalize();

  std::filesystem::path root_;
  std::map<VideoId, VideoRecord> videos_;
  std::map<KeyframeId, KeyframeRecord> keyframes_;
  std::map<KeyframeId, KeyframeFeatures> features_;
  std::map<KeyframeId, FeatureVector> vectors_;
  BucketTable buckets_;
  ScalingStats scaling_;
  std::uintmax_t journal_bytes_ = 0;
};

struct QuarantinedLine {
  std::size_t line = 0;
  std::string reason;
};

struct LoadReport {
  std::size_t records = 0;
  std::vector<QuarantinedLine> quarantined;
};

/// Where a registration may be made to stop dead, as if the process died.
enum class FaultPoint {
  None,
  AfterBlobs,
  AfterJournalTemp,
};

class SimulatedCrash : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * File-backed record store.
 *
 * Layout under the root directory:
 *   meta              format version line
 *   journal.ndjson    header line, then one JSON video record (with its
 *                     keyframe records nested) per line
 *   blobs/<i_id>.pgm  keyframe images, full resolution gray
 *   scaling.json      scaling stats of the current records
 *
 * A registration rewrites the journal to a temporary file, syncs it and
 * renames it over the old journal, so readers and crashes see either all of
 * a registration or none of it. One writer at a time; any number of readers
 * hold snapshots.
 */
class Catalog {
 public:
  /// Opens or creates the catalog. Lines that fail to parse or validate are
  /// skipped and listed in `report`. Throws CorruptJournal when the header
  /// or the format version is unreadable.
  explicit Catalog(std::filesystem::path root, LoadReport* report = nullptr);

  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  std::shared_ptr<const CatalogSnapshot> snapshot() const;

  /// Runs keyframe extraction, featurisation, bucketing and motion, then
  /// commits the video and its keyframes atomically.
  Registration register_video(std::string_view name, const FrameSeq& frames,
                              const RegistrationConfig& config = {});

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Test hook: the next registration stops at `point` with SimulatedCrash.
  void inject_fault(FaultPoint point) { fault_ = point; }

 private:
  std::shared_ptr<CatalogSnapshot> load(LoadReport* report) const;
  void commit(Registration& reg, const std::vector<KeyframeFeatures>& features,
              const std::vector<GrayRaster>& images);

  std::filesystem::path root_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const CatalogSnapshot> current_;
  std::mutex writer_mutex_;
  FaultPoint fault_ = FaultPoint::None;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace clipseek
