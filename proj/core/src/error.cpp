#include "clipseek/error.hpp"

namespace clipseek {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedImage: return "MalformedImage";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::EmptyDirectory: return "EmptyDirectory";
    case Errc::NoDecodableFrames: return "NoDecodableFrames";
    case Errc::TooManyFrames: return "TooManyFrames";
    case Errc::TooNarrow: return "TooNarrow";
    case Errc::TooSmall: return "TooSmall";
    case Errc::Overflow: return "Overflow";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::BadPixelCount: return "BadPixelCount";
    case Errc::DuplicateKeyframe: return "DuplicateKeyframe";
    case Errc::TooFewKeyframes: return "TooFewKeyframes";
    case Errc::NoMotion: return "NoMotion";
    case Errc::DegeneratePolyline: return "DegeneratePolyline";
    case Errc::BadCoordinates: return "BadCoordinates";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NoRetrievals: return "NoRetrievals";
    case Errc::NoRelevantVideos: return "NoRelevantVideos";
    case Errc::NotFound: return "NotFound";
    case Errc::NameTooLong: return "NameTooLong";
    case Errc::StorageFull: return "StorageFull";
    case Errc::CorruptJournal: return "CorruptJournal";
    case Errc::EmptyArchive: return "EmptyArchive";
    case Errc::MalformedArchive: return "MalformedArchive";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace clipseek
