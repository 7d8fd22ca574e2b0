#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clipseek {

// Closed set of failure kinds. The service layer maps each one onto an HTTP
// status and reports the name verbatim as the error code.
enum class Errc {
  MalformedImage,
  UnsupportedFormat,
  DimensionMismatch,
  EmptySequence,
  EmptyDirectory,
  NoDecodableFrames,
  TooManyFrames,
  TooNarrow,
  TooSmall,
  Overflow,
  ParseFailure,
  BadPixelCount,
  DuplicateKeyframe,
  TooFewKeyframes,
  NoMotion,
  DegeneratePolyline,
  BadCoordinates,
  LengthMismatch,
  NoRetrievals,
  NoRelevantVideos,
  NotFound,
  NameTooLong,
  StorageFull,
  CorruptJournal,
  EmptyArchive,
  MalformedArchive,
  InvalidArgument,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace clipseek
