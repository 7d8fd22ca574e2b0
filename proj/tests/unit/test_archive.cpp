#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "clipseek/archive.hpp"
#include "clipseek/raster.hpp"
#include "support.hpp"

using namespace clipseek;
using namespace clipseek::testing;

namespace {

std::vector<std::uint8_t> fixture(const std::string& name) {
  return read_bytes(std::filesystem::path(CLIPSEEK_FIXTURE_DIR) / name);
}

const std::vector<std::uint8_t> kGray(std::initializer_list<std::uint8_t>{'P', '5', ' ', '2', ' ', '1', ' ', '2', '5',
                                                                           '5', '\n', 0x00, 0xFF});

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<ArchiveEntry> sample_entries() {
  std::mt19937_64 rng(4);
  std::vector<ArchiveEntry> out;
  for (int i = 0; i < 4; ++i) {
    ArchiveEntry e;
    e.name = "f00" + std::to_string(i) + ".ppm";
    e.data = encode_ppm(random_rgb(rng, 13 + i, 7));
    out.push_back(e);
  }
  out.push_back({"empty.txt", {}});
  return out;
}

void expect_same(const std::vector<ArchiveEntry>& a, const std::vector<ArchiveEntry>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].data, b[i].data);
  }
}

}  // namespace

TEST(Archive, DetectsFormats) {
  EXPECT_EQ(detect_archive(fixture("frames.zip")), ArchiveFormat::Zip);
  EXPECT_EQ(detect_archive(fixture("frames_gnu.tar")), ArchiveFormat::Tar);
  EXPECT_EQ(detect_archive(fixture("frames_ustar.tar")), ArchiveFormat::Tar);
  EXPECT_EQ(detect_archive(fixture("frames.tar.gz")), ArchiveFormat::TarGz);
  EXPECT_EQ(error_code_of([] { detect_archive(bytes("hello world, definitely not an archive")); }),
            Errc::MalformedArchive);
}

TEST(Archive, ReadsExternalZipWithDeflate) {
  const auto entries = read_archive(fixture("frames.zip"));
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].name, "f001.pgm");
  EXPECT_EQ(entries[0].data, kGray);
  EXPECT_EQ(entries[1].name, "f002.ppm");
  EXPECT_EQ(decode_frame(entries[1].data).at(0, 0), (Rgb{0x10, 0x20, 0x30}));
}

TEST(Archive, ReadsExternalStoredZip) {
  const auto entries = read_archive(fixture("stored.zip"));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].data, kGray);
}

TEST(Archive, ReadsExternalTarsWithLongNames) {
  for (const char* name : {"frames_gnu.tar", "frames_ustar.tar", "frames.tar.gz"}) {
    const auto entries = read_archive(fixture(name));
    ASSERT_EQ(entries.size(), 2u) << name;
    EXPECT_EQ(entries[0].name, "f001.pgm");
    EXPECT_EQ(entries[0].data, kGray);
    EXPECT_EQ(entries[1].name, "f002.ppm") << name;
  }
}

TEST(Archive, WritersRoundTrip) {
  const auto entries = sample_entries();
  expect_same(read_archive(write_tar(entries)), entries);
  expect_same(read_archive(gzip(write_tar(entries))), entries);
  expect_same(read_archive(write_zip(entries, false)), entries);
  expect_same(read_archive(write_zip(entries, true)), entries);
  EXPECT_LT(write_zip({{"z", std::vector<std::uint8_t>(10000, 7)}}, true).size(), 1000u);
}

TEST(Archive, NamesAreReducedToBasenames) {
  const auto entries = read_archive(write_tar({{"../../etc/evil.ppm", kGray}, {"a/b/.hidden", kGray}}));
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].name, "evil.ppm");
}

TEST(Archive, EmptyInputs) {
  EXPECT_EQ(error_code_of([] { read_archive(std::vector<std::uint8_t>{}); }), Errc::EmptyArchive);
  EXPECT_EQ(error_code_of([] { read_archive(write_tar({})); }), Errc::EmptyArchive);
  EXPECT_EQ(error_code_of([] { read_archive(write_zip({}, false)); }), Errc::EmptyArchive);
}

TEST(Archive, CorruptionIsMalformed) {
  auto zip = write_zip(sample_entries(), true);
  zip[40] ^= 0xFF;  // inside the first member's compressed data
  EXPECT_EQ(error_code_of([&] { read_archive(zip); }), Errc::MalformedArchive);

  auto tar = write_tar(sample_entries());
  tar[148] ^= 0x01;  // header checksum field
  EXPECT_EQ(error_code_of([&] { read_archive(tar); }), Errc::MalformedArchive);

  auto truncated = write_tar(sample_entries());
  truncated.resize(700);
  EXPECT_EQ(error_code_of([&] { read_archive(truncated); }), Errc::MalformedArchive);

  auto gz = gzip(write_tar(sample_entries()));
  gz.resize(gz.size() / 2);
  EXPECT_EQ(error_code_of([&] { read_archive(gz); }), Errc::MalformedArchive);
}

TEST(Archive, LimitIsEnforced) {
  const std::vector<ArchiveEntry> big = {{"big.ppm", std::vector<std::uint8_t>(4096, 1)}};
  EXPECT_EQ(error_code_of([&] { read_archive(write_zip(big, true), 1000); }), Errc::Overflow);
  EXPECT_EQ(error_code_of([&] { read_archive(gzip(write_tar(big)), 1000); }), Errc::Overflow);
  EXPECT_EQ(read_archive(write_tar(big), 4096).size(), 1u);
}

TEST(Archive, ExtractWritesFiles) {
  TempDir dir;
  const auto out = dir / "x";
  EXPECT_EQ(extract_archive(fixture("frames.zip"), out), 2u);
  EXPECT_EQ(read_bytes(out / "f001.pgm"), kGray);
  EXPECT_TRUE(std::filesystem::exists(out / "f002.ppm"));
  EXPECT_FALSE(std::filesystem::exists(out / ".DS_Store"));
}
