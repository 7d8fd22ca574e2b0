#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace clipseek {

enum class ArchiveFormat { Zip, Tar, TarGz };

struct ArchiveEntry {
  /// Basename only; directory components are dropped.
  std::string name;
  std::vector<std::uint8_t> data;
};

inline constexpr std::size_t kDefaultArchiveLimit = std::size_t{512} << 20;

/// Detects the format from magic bytes. Throws MalformedArchive.
ArchiveFormat detect_archive(std::span<const std::uint8_t> bytes);

/// Regular-file members in archive order. Directories, links and hidden files
/// are skipped. Throws EmptyArchive for zero-length input or no file members,
/// MalformedArchive for corrupt structure, Overflow when the unpacked size
/// exceeds `limit`.
std::vector<ArchiveEntry> read_archive(std::span<const std::uint8_t> bytes,
                                       std::size_t limit = kDefaultArchiveLimit);

/// Writes each member of the archive into `dir` (created if needed). Later
/// members with the same basename replace earlier ones. Returns the number of
/// files written.
std::size_t extract_archive(std::span<const std::uint8_t> bytes, const std::filesystem::path& dir,
                            std::size_t limit = kDefaultArchiveLimit);

/// Minimal writers, used by tests and the seed tooling.
std::vector<std::uint8_t> write_tar(const std::vector<ArchiveEntry>& entries);
std::vector<std::uint8_t> write_zip(const std::vector<ArchiveEntry>& entries, bool compress_members);
std::vector<std::uint8_t> gzip(std::span<const std::uint8_t> bytes);

}  // namespace clipseek
