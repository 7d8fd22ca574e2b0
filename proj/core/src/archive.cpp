#include "clipseek/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "clipseek/error.hpp"

namespace clipseek {

namespace {

constexpr std::size_t kTarBlock = 512;

[[noreturn]] void malformed(const std::string& what) { fail(Errc::MalformedArchive, what); }

std::uint32_t le16(const std::uint8_t* p) { return p[0] | (p[1] << 8); }
std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}
void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, v & 0xffff);
  put16(out, v >> 16);
}

// Empty string for names that must not be written.
std::string sanitize(std::string_view raw) {
  std::string name(raw);
  std::replace(name.begin(), name.end(), '\\', '/');
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  if (name.empty() || name == "." || name == ".." || name.front() == '.') return {};
  if (name.find('\0') != std::string::npos) return {};
  return name;
}

class Budget {
 public:
  explicit Budget(std::size_t limit) : left_(limit) {}
  void take(std::size_t n) {
    if (n > left_) fail(Errc::Overflow, "archive expands beyond the size limit");
    left_ -= n;
  }

 private:
  std::size_t left_;
};

std::vector<std::uint8_t> inflate_stream(std::span<const std::uint8_t> in, int window_bits,
                                         Budget& budget, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) fail(Errc::Io, "inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::vector<std::uint8_t> out;
  out.reserve(expected);
  std::uint8_t chunk[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      malformed("compressed data is corrupt");
    }
    const std::size_t produced = sizeof chunk - zs.avail_out;
    try {
      budget.take(produced);
    } catch (...) {
      inflateEnd(&zs);
      throw;
    }
    out.insert(out.end(), chunk, chunk + produced);
    if (rc == Z_OK && produced == 0 && zs.avail_in == 0) {
      inflateEnd(&zs);
      malformed("compressed data is truncated");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::uint64_t tar_octal(const std::uint8_t* field, std::size_t len) {
  std::uint64_t v = 0;
  std::size_t i = 0;
  while (i < len && (field[i] == ' ' || field[i] == 0)) ++i;
  for (; i < len && field[i] >= '0' && field[i] <= '7'; ++i) v = v * 8 + (field[i] - '0');
  for (; i < len; ++i) {
    if (field[i] != ' ' && field[i] != 0) malformed("bad octal field in tar header");
  }
  return v;
}

bool tar_checksum_ok(const std::uint8_t* h) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < kTarBlock; ++i) sum += (i >= 148 && i < 156) ? ' ' : h[i];
  return sum == tar_octal(h + 148, 8);
}

std::vector<ArchiveEntry> read_tar(std::span<const std::uint8_t> bytes, Budget& budget) {
  std::vector<ArchiveEntry> out;
  std::string long_name;
  std::size_t pos = 0;
  while (pos + kTarBlock <= bytes.size()) {
    const std::uint8_t* h = bytes.data() + pos;
    if (std::all_of(h, h + kTarBlock, [](std::uint8_t b) { return b == 0; })) break;
    if (!tar_checksum_ok(h)) malformed("tar header checksum mismatch");
    const std::uint64_t size = tar_octal(h + 124, 12);
    const char type = static_cast<char>(h[156]);
    pos += kTarBlock;
    if (size > bytes.size() - pos) malformed("tar member runs past end of archive");
    const auto body = bytes.subspan(pos, size);
    pos += (size + kTarBlock - 1) / kTarBlock * kTarBlock;

    if (type == 'L') {  // GNU long name for the next member
      long_name.assign(body.begin(), body.end());
      long_name = long_name.c_str();
      continue;
    }
    std::string name;
    if (!long_name.empty()) {
      name = std::move(long_name);
      long_name.clear();
    } else {
      name.assign(reinterpret_cast<const char*>(h), strnlen(reinterpret_cast<const char*>(h), 100));
      if (std::memcmp(h + 257, "ustar", 5) == 0 && h[345] != 0) {
        const std::string prefix(reinterpret_cast<const char*>(h + 345),
                                 strnlen(reinterpret_cast<const char*>(h + 345), 155));
        name = prefix + "/" + name;
      }
    }
    if (type != '0' && type != '\0') continue;
    std::string clean = sanitize(name);
    if (clean.empty()) continue;
    budget.take(size);
    out.push_back({std::move(clean), {body.begin(), body.end()}});
  }
  return out;
}

std::vector<ArchiveEntry> read_zip(std::span<const std::uint8_t> bytes, Budget& budget) {
  // End of central directory: fixed 22 bytes plus a comment of up to 64 KiB.
  if (bytes.size() < 22) malformed("zip too short");
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = bytes.size() > 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (std::size_t i = bytes.size() - 22 + 1; i-- > lowest;) {
    if (le32(bytes.data() + i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) malformed("zip end-of-central-directory not found");
  const std::uint8_t* e = bytes.data() + eocd;
  const std::size_t count = le16(e + 10);
  const std::size_t cd_size = le32(e + 12);
  std::size_t cd = le32(e + 16);
  if (cd > eocd || cd_size > eocd - cd) malformed("zip central directory out of range");

  std::vector<ArchiveEntry> out;
  for (std::size_t n = 0; n < count; ++n) {
    if (cd + 46 > eocd || le32(bytes.data() + cd) != 0x02014b50) malformed("bad central directory entry");
    const std::uint8_t* c = bytes.data() + cd;
    const std::uint32_t method = le16(c + 10);
    const std::uint32_t crc = le32(c + 16);
    const std::size_t csize = le32(c + 20);
    const std::size_t usize = le32(c + 24);
    const std::size_t name_len = le16(c + 28);
    const std::size_t extra_len = le16(c + 30);
    const std::size_t comment_len = le16(c + 32);
    const std::size_t local = le32(c + 42);
    if (cd + 46 + name_len > eocd) malformed("central directory name out of range");
    const std::string name(reinterpret_cast<const char*>(c + 46), name_len);
    cd += 46 + name_len + extra_len + comment_len;

    if (name.empty() || name.back() == '/') continue;
    std::string clean = sanitize(name);
    if (clean.empty()) continue;

    if (local + 30 > bytes.size() || le32(bytes.data() + local) != 0x04034b50) {
      malformed("bad local header for " + name);
    }
    const std::uint8_t* l = bytes.data() + local;
    const std::size_t data_at = local + 30 + le16(l + 26) + le16(l + 28);
    if (data_at > bytes.size() || csize > bytes.size() - data_at) malformed("zip member out of range");
    const auto payload = bytes.subspan(data_at, csize);

    std::vector<std::uint8_t> data;
    if (method == 0) {
      if (csize != usize) malformed("stored member size mismatch");
      budget.take(usize);
      data.assign(payload.begin(), payload.end());
    } else if (method == 8) {
      data = inflate_stream(payload, -MAX_WBITS, budget, usize);
      if (data.size() != usize) malformed("inflated size mismatch for " + name);
    } else {
      malformed("unsupported zip compression method " + std::to_string(method));
    }
    const auto actual = crc32(0L, data.data(), static_cast<uInt>(data.size()));
    if (actual != crc) malformed("crc mismatch for " + name);
    out.push_back({std::move(clean), std::move(data)});
  }
  return out;
}

}  // namespace

ArchiveFormat detect_archive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && le32(bytes.data()) == 0x04034b50) return ArchiveFormat::Zip;
  if (bytes.size() >= 4 && le32(bytes.data()) == 0x06054b50) return ArchiveFormat::Zip;
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) return ArchiveFormat::TarGz;
  if (bytes.size() >= kTarBlock) return ArchiveFormat::Tar;
  malformed("unrecognised archive format");
}

std::vector<ArchiveEntry> read_archive(std::span<const std::uint8_t> bytes, std::size_t limit) {
  if (bytes.empty()) fail(Errc::EmptyArchive, "archive is empty");
  Budget budget(limit);
  std::vector<ArchiveEntry> entries;
  switch (detect_archive(bytes)) {
    case ArchiveFormat::Zip:
      entries = read_zip(bytes, budget);
      break;
    case ArchiveFormat::Tar:
      entries = read_tar(bytes, budget);
      break;
    case ArchiveFormat::TarGz: {
      Budget tar_budget(limit);
      const auto tar = inflate_stream(bytes, 16 + MAX_WBITS, budget, bytes.size() * 4);
      entries = read_tar(tar, tar_budget);
      break;
    }
  }
  if (entries.empty()) fail(Errc::EmptyArchive, "archive has no files");
  return entries;
}

std::size_t extract_archive(std::span<const std::uint8_t> bytes, const std::filesystem::path& dir,
                            std::size_t limit) {
  const auto entries = read_archive(bytes, limit);
  std::filesystem::create_directories(dir);
  for (const ArchiveEntry& e : entries) {
    std::ofstream f(dir / e.name, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(e.data.data()), static_cast<std::streamsize>(e.data.size()));
    if (!f) fail(Errc::Io, "cannot write " + (dir / e.name).string());
  }
  return entries.size();
}

std::vector<std::uint8_t> write_tar(const std::vector<ArchiveEntry>& entries) {
  std::vector<std::uint8_t> out;
  for (const ArchiveEntry& e : entries) {
    if (e.name.size() >= 100) fail(Errc::InvalidArgument, "tar member name too long: " + e.name);
    std::uint8_t h[kTarBlock] = {};
    std::memcpy(h, e.name.data(), e.name.size());
    std::snprintf(reinterpret_cast<char*>(h + 100), 8, "%07o", 0644);
    std::snprintf(reinterpret_cast<char*>(h + 108), 8, "%07o", 0);
    std::snprintf(reinterpret_cast<char*>(h + 116), 8, "%07o", 0);
    std::snprintf(reinterpret_cast<char*>(h + 124), 12, "%011llo",
                  static_cast<unsigned long long>(e.data.size()));
    std::snprintf(reinterpret_cast<char*>(h + 136), 12, "%011o", 0);
    h[156] = '0';
    std::memcpy(h + 257, "ustar\0" "00", 8);
    std::memset(h + 148, ' ', 8);
    unsigned sum = 0;
    for (std::uint8_t b : h) sum += b;
    std::snprintf(reinterpret_cast<char*>(h + 148), 8, "%06o", sum);
    h[155] = ' ';
    out.insert(out.end(), h, h + kTarBlock);
    out.insert(out.end(), e.data.begin(), e.data.end());
    out.resize((out.size() + kTarBlock - 1) / kTarBlock * kTarBlock, 0);
  }
  out.resize(out.size() + 2 * kTarBlock, 0);
  return out;
}

std::vector<std::uint8_t> write_zip(const std::vector<ArchiveEntry>& entries, bool compress_members) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  for (const ArchiveEntry& e : entries) {
    const auto crc = static_cast<std::uint32_t>(crc32(0L, e.data.data(), static_cast<uInt>(e.data.size())));
    std::vector<std::uint8_t> payload = e.data;
    std::uint32_t method = 0;
    if (compress_members) {
      uLongf bound = compressBound(static_cast<uLong>(e.data.size()));
      std::vector<std::uint8_t> buf(bound);
      z_stream zs{};
      deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
      zs.next_in = const_cast<Bytef*>(e.data.data());
      zs.avail_in = static_cast<uInt>(e.data.size());
      zs.next_out = buf.data();
      zs.avail_out = static_cast<uInt>(buf.size());
      deflate(&zs, Z_FINISH);
      buf.resize(zs.total_out);
      deflateEnd(&zs);
      payload = std::move(buf);
      method = 8;
    }
    const auto offset = static_cast<std::uint32_t>(out.size());
    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, method);
    put32(out, 0);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(payload.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, static_cast<std::uint32_t>(e.name.size()));
    put16(out, 0);
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), payload.begin(), payload.end());

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, method);
    put32(central, 0);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put32(central, static_cast<std::uint32_t>(e.data.size()));
    put16(central, static_cast<std::uint32_t>(e.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central.insert(central.end(), e.name.begin(), e.name.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

std::vector<std::uint8_t> gzip(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    fail(Errc::Io, "deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(bytes.size())));
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

}  // namespace clipseek
